#include <iostream>
using namespace std;
const int MAXN = 1000;
int memo[MAXN];
int fib(int n) {
  if (n < 2) return n;
  if (memo[n] != 0) return memo[n];
  memo[n] = fib(n - 1) + fib(n - 2);
  return memo[n];
}
int main() {
  int n;
  cin >> n;
  cout << fib(n) << endl;
  return 0;
}
