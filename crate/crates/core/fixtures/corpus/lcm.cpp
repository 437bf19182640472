#include <iostream>
using namespace std;
long long gcd(long long a, long long b) {
  return b == 0 ? a : gcd(b, a % b);
}
long long lcm(long long a, long long b) {
  return a / gcd(a, b) * b;
}
int main() {
  int n;
  cin >> n;
  long long acc = 1;
  for (int i = 0; i < n; i++) {
    long long x;
    cin >> x;
    acc = lcm(acc, x);
  }
  cout << acc << endl;
  return 0;
}
