#include <iostream>
using namespace std;
int main() {
  int choice;
  int balance = 0;
  do {
    cin >> choice;
    if (choice == 1) {
      int amount;
      cin >> amount;
      balance += amount;
    } else if (choice == 2) {
      cout << balance << endl;
    }
  } while (choice != 0);
  return 0;
}
