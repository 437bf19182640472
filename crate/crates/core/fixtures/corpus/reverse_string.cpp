#include <iostream>
#include <string>
using namespace std;
int main() {
  string s;
  getline(cin, s);
  string r = "";
  for (int i = s.size() - 1; i >= 0; i--) {
    r += s[i];
  }
  cout << r << endl;
  return 0;
}
