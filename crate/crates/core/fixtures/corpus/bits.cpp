#include <iostream>
using namespace std;
int popcount(unsigned int x) {
  int c = 0;
  while (x) {
    c += x & 1;
    x >>= 1;
  }
  return c;
}
int main() {
  unsigned int v;
  cin >> v;
  cout << popcount(v) << endl;
  return 0;
}
