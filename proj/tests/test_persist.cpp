#include <doctest.h>

#include <string>
#include <vector>

#include "tacpred/persist.hpp"

using namespace tacpred;

TEST_CASE("PList push_front and iteration order") {
  PList<int> l;
  CHECK(l.empty());
  auto l3 = l.push_front(1).push_front(2).push_front(3);
  CHECK(l3.size() == 3);
  std::vector<int> got(l3.begin(), l3.end());
  CHECK(got == std::vector<int>{3, 2, 1});
  CHECK(l.empty());  // original untouched
}

TEST_CASE("PList versions share tails independently") {
  auto base = PList<int>{}.push_front(1).push_front(2);
  auto a = base.push_front(10);
  auto b = base.push_front(20);
  CHECK(std::vector<int>(a.begin(), a.end()) == std::vector<int>{10, 2, 1});
  CHECK(std::vector<int>(b.begin(), b.end()) == std::vector<int>{20, 2, 1});
  CHECK(base.size() == 2);
}

TEST_CASE("PList from_range preserves order") {
  std::vector<int> in{4, 5, 6};
  auto l = PList<int>::from_range(in);
  CHECK(std::vector<int>(l.begin(), l.end()) == in);
}

TEST_CASE("PList long chain teardown does not overflow the stack") {
  {
    PList<std::string> l;
    for (int i = 0; i < 200000; ++i) l = l.push_front("x");
    CHECK(l.size() == 200000);
  }  // destruction happens here
  CHECK(true);
}

TEST_CASE("CowVec basics") {
  CowVec<int> v;
  for (int i = 0; i < 1000; ++i) v.push_back(i);
  CHECK(v.size() == 1000);
  CHECK(v[0] == 0);
  CHECK(v[999] == 999);
  v.set(500, -1);
  CHECK(v[500] == -1);
}

TEST_CASE("CowVec copies are independent versions") {
  CowVec<int> v0;
  for (int i = 0; i < 600; ++i) v0.push_back(i);
  CowVec<int> v1 = v0;

  v1.set(10, 42);
  v1.push_back(600);
  CHECK(v0[10] == 10);
  CHECK(v0.size() == 600);
  CHECK(v1[10] == 42);
  CHECK(v1.size() == 601);

  // Sibling versions appending to the same shared tail chunk.
  CowVec<int> v2 = v0;
  v0.push_back(700);
  v2.push_back(800);
  CHECK(v0[600] == 700);
  CHECK(v2[600] == 800);
}
