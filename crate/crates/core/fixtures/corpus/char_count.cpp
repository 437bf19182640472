#include <iostream>
#include <string>
using namespace std;
int counts[26];
int main() {
  string s;
  cin >> s;
  for (int i = 0; i < s.size(); i++) counts[s[i] - 'a']++;
  int distinct = 0;
  for (int c = 0; c < 26; c++)
    if (counts[c] > 0) distinct++;
  cout << distinct << endl;
  return 0;
}
