#include <iostream>
using namespace std;
int main() {
  int x = 1;
  {
    int x = 2;
    cout << x << endl;
  }
  cout << x << endl;
  ;
  return 0;
}
