#include <iostream>
#include <map>
using namespace std;
int main() {
  int n, target;
  cin >> n >> target;
  map<int, int> pos;
  int ans_i = -1, ans_j = -1;
  for (int i = 0; i < n; i++) {
    int x;
    cin >> x;
    if (pos.count(target - x)) {
      ans_i = pos[target - x];
      ans_j = i;
    }
    pos[x] = i;
  }
  cout << ans_i << " " << ans_j << endl;
  return 0;
}
