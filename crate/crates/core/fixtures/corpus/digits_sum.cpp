#include <iostream>
using namespace std;
int main() {
  long long n;
  cin >> n;
  int total = 0;
  do {
    total += n % 10;
    n /= 10;
  } while (n > 0);
  cout << total << endl;
  return 0;
}
