#include <iomanip>
#include <iostream>
using namespace std;
int main() {
  int n;
  cin >> n;
  double total = 0;
  for (int i = 0; i < n; i++) {
    double v;
    cin >> v;
    total += v;
  }
  double avg = n > 0 ? total / n : 0;
  cout << fixed << setprecision(2) << avg << endl;
  return 0;
}
