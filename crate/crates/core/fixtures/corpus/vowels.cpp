#include <iostream>
#include <string>
using namespace std;
bool vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}
int main() {
  string s;
  cin >> s;
  string out;
  for (char c : s)
    if (!vowel(c)) out += c;
  cout << out << endl;
  return 0;
}
