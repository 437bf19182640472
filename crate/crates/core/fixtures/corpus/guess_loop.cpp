#include <iostream>
using namespace std;
int main() {
  int secret = 42, guess = 0, tries = 0;
  do {
    cin >> guess;
    tries++;
    if (guess < secret) cout << "higher" << endl;
    else if (guess > secret) cout << "lower" << endl;
  } while (guess != secret && tries < 10);
  cout << tries << endl;
  return 0;
}
