#include <iostream>
#include <string>
using namespace std;
int main() {
  string line;
  int number = 1;
  while (getline(cin, line)) {
    cout << number << ": " << line << endl;
    ++number;
  }
  return 0;
}
