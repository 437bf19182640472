#include <algorithm>
#include <iostream>
#include <vector>
using namespace std;
int main() {
  int n;
  cin >> n;
  vector<pair<int, int> > items;
  for (int i = 0; i < n; i++) {
    int w, v;
    cin >> w >> v;
    items.push_back(make_pair(w, v));
  }
  sort(items.begin(), items.end());
  for (int i = 0; i < n; i++) cout << items[i].first << " " << items[i].second << endl;
  return 0;
}
