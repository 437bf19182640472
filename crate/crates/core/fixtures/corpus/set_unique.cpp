#include <iostream>
#include <set>
using namespace std;
int main() {
  int n;
  cin >> n;
  set<int> seen;
  for (int i = 0; i < n; i++) {
    int x;
    cin >> x;
    seen.insert(x);
  }
  cout << seen.size() << endl;
  return 0;
}
