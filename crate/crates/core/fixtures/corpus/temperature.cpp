#include <iostream>
using namespace std;
double to_celsius(double f)
{
  return (f - 32) * 5 / 9;
}
int main() {
  double f;
  while (cin >> f) {
    double c = to_celsius(f);
    if (c < 0) cout << "freezing ";
    cout << c << endl;
  }
  return 0;
}
