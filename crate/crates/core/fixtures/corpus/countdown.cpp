#include <iostream>
using namespace std;
int main() {
  int k;
  cin >> k;
  while (k > 0) {
    cout << k << endl;
    k--;
  }
  cout << "liftoff" << endl;
  return 0;
}
