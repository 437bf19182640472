#include <iostream>
using namespace std;
typedef long long ll;
ll power(ll base, int e, ll mod) {
  ll result = 1;
  base %= mod;
  while (e > 0) {
    if (e & 1) result = result * base % mod;
    base = base * base % mod;
    e >>= 1;
  }
  return result;
}
int main() {
  ll b, m;
  int e;
  cin >> b >> e >> m;
  cout << power(b, e, m) << endl;
  return 0;
}
