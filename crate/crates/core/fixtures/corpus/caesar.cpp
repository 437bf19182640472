#include <iostream>
#include <string>
using namespace std;
char shift(char c, int k) {
  if (c >= 'a' && c <= 'z') return 'a' + (c - 'a' + k) % 26;
  if (c >= 'A' && c <= 'Z') return 'A' + (c - 'A' + k) % 26;
  return c;
}
int main() {
  int k;
  string text;
  cin >> k >> text;
  for (int i = 0; i < text.size(); i++) text[i] = shift(text[i], k);
  cout << text << endl;
  return 0;
}
