#include <iostream>
using namespace std;
int grid[50][50];
int main() {
  int r, c;
  cin >> r >> c;
  for (int i = 0; i < r; i++)
    for (int j = 0; j < c; j++) cin >> grid[i][j];
  int total = 0;
  for (int i = 0; i < r; i++) {
    for (int j = 0; j < c; j++) {
      total += grid[i][j];
    }
  }
  cout << total << endl;
  return 0;
}
