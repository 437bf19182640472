#include <cmath>
#include <iostream>
using namespace std;
int main() {
  int n;
  cin >> n;
  int prev;
  cin >> prev;
  long long total = 0;
  for (int i = 1; i < n; i++) {
    int cur;
    cin >> cur;
    total += abs(cur - prev);
    prev = cur;
  }
  cout << total << endl;
  return 0;
}
