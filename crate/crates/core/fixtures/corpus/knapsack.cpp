#include <iostream>
#include <vector>
using namespace std;
int main() {
  int n, cap;
  cin >> n >> cap;
  vector<int> dp(cap + 1, 0);
  for (int i = 0; i < n; i++) {
    int w, v;
    cin >> w >> v;
    for (int c = cap; c >= w; c--) {
      dp[c] = max(dp[c], dp[c - w] + v);
    }
  }
  cout << dp[cap] << endl;
  return 0;
}
