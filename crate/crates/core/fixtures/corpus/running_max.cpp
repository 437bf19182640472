#include <iostream>
using namespace std;
int main() {
  int n;
  cin >> n;
  int best = -1;
  int i = 0;
  while (i < n) {
    int x;
    cin >> x;
    if (x > best) {
      best = x;
      cout << "new max " << best << endl;
    }
    i++;
  }
  return 0;
}
