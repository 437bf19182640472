#include <iostream>
#include <vector>
using namespace std;
int main() {
  int n, target;
  cin >> n >> target;
  vector<int> a(n);
  for (int i = 0; i < n; i++) cin >> a[i];
  int lo = 0, hi = n - 1, found = -1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (a[mid] == target) {
      found = mid;
      break;
    } else if (a[mid] < target) {
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  cout << found << endl;
  return 0;
}
