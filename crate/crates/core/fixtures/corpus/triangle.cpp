#include <iostream>
using namespace std;
int main() {
  int h;
  cin >> h;
  for (int row = 1; row <= h; row++) {
    for (int s = 0; s < h - row; s++) cout << " ";
    for (int k = 0; k < 2 * row - 1; k++) cout << "*";
    cout << endl;
  }
  return 0;
}
