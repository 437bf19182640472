#include <iostream>
#include <string>
using namespace std;
bool is_palindrome(const string &s) {
  int i = 0, j = s.size() - 1;
  while (i < j) {
    if (s[i] != s[j]) return false;
    i++;
    j--;
  }
  return true;
}
int main() {
  string w;
  cin >> w;
  if (is_palindrome(w)) {
    cout << "YES" << endl;
  } else {
    cout << "NO" << endl;
  }
  return 0;
}
