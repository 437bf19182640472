#include <iostream>
using namespace std;
int square(int v)
{
  return v * v;
}
int main()
{
  int n;
  cin >> n;
  cout << square(n) << endl;
  return 0;
}
