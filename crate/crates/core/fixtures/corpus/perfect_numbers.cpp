#include <iostream>
using namespace std;
int divisor_sum(int n);
bool perfect(int n) {
  return n > 1 && divisor_sum(n) == n;
}
int main() {
  int limit;
  cin >> limit;
  for (int k = 2; k <= limit; k++)
    if (perfect(k)) cout << k << endl;
  return 0;
}
int divisor_sum(int n) {
  int s = 1;
  for (int d = 2; d * d <= n; d++) {
    if (n % d == 0) {
      s += d;
      if (d != n / d) s += n / d;
    }
  }
  return s;
}
