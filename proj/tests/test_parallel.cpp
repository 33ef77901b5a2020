#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nhse/parallel.hpp"

TEST_CASE("every index runs exactly once") {
  for (int threads : {1, 2, 4}) {
    nhse::set_thread_count(threads);
    CHECK(nhse::thread_count() == threads);
    std::vector<std::atomic<int>> hits(1000);
    nhse::parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    int bad = 0;
    for (auto& h : hits) bad += h.load() != 1;
    CHECK(bad == 0);
  }
  nhse::set_thread_count(0);
  CHECK(nhse::thread_count() >= 1);
}

TEST_CASE("empty range is a no-op") {
  bool called = false;
  nhse::parallel_for(0, [&](std::size_t) { called = true; });
  CHECK_FALSE(called);
}

TEST_CASE("exceptions propagate after all tasks finish") {
  nhse::set_thread_count(3);
  std::atomic<int> done{0};
  CHECK_THROWS_AS(nhse::parallel_for(50,
                                     [&](std::size_t i) {
                                       done++;
                                       if (i == 7) throw std::runtime_error("boom");
                                     }),
                  std::runtime_error);
  CHECK(done.load() >= 1);
  nhse::set_thread_count(0);
}

TEST_CASE("results do not depend on the worker count") {
  std::vector<double> a(257), b(257);
  nhse::set_thread_count(1);
  nhse::parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(0.1 * i) * i; });
  nhse::set_thread_count(4);
  nhse::parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(0.1 * i) * i; });
  nhse::set_thread_count(0);
  CHECK(a == b);
}
