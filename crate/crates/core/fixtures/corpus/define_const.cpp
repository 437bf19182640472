#include <iostream>
#define LIMIT 10
using namespace std;
int main() {
  int total = 0;
  for (int i = 0; i < LIMIT; i++) total += i;
  if (total > LIMIT) {
    cout << total << endl;
  }
  return 0;
}
