#include <iostream>
using namespace std;
void swap_values(int &a, int &b) {
  int tmp = a;
  a = b;
  b = tmp;
}
int main() {
  int p, q;
  cin >> p >> q;
  swap_values(p, q);
  cout << p << " " << q << endl;
  return 0;
}
