#include <iostream>
using namespace std;
int main() {
  int n, steps = 0;
  cin >> n;
  do
    n /= 2, steps++;
  while (n > 0);
  do steps--; while (steps > 100);
  cout << steps << endl;
  return 0;
}
