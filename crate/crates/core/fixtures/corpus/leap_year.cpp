#include <iostream>
using namespace std;
bool leap(int y);
int main() {
  int y;
  cin >> y;
  if (leap(y)) cout << "leap" << endl;
  else cout << "common" << endl;
  return 0;
}
bool leap(int y) {
  if (y % 400 == 0) return true;
  if (y % 100 == 0) return false;
  return y % 4 == 0;
}
