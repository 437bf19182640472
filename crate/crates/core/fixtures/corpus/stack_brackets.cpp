#include <iostream>
#include <stack>
#include <string>
using namespace std;
int main() {
  string s;
  cin >> s;
  stack<char> st;
  bool ok = true;
  for (char ch : s) {
    if (ch == '(') {
      st.push(ch);
    } else if (st.empty()) {
      ok = false;
      break;
    } else {
      st.pop();
    }
  }
  if (!st.empty()) ok = false;
  cout << (ok ? "YES" : "NO") << endl;
  return 0;
}
