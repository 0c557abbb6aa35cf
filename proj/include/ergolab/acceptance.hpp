#pragma once

#include <string>
#include <vector>

namespace ergolab::acc {

struct Result {
    int id = 0;
    std::string title;
    bool property = false;  // the numeric claim itself
    double seconds = 0;
    double limit = 0;       // allowed wall-clock seconds
    std::string detail;
    bool pass() const { return property && seconds < limit; }
    std::string line() const;  // "PASS  3  ..." one line
};

constexpr int kCriteria = 12;

// one criterion; throws DomainError for ids outside 1..12
Result run(int id);
// empty list: all twelve in order
std::vector<Result> run_all(const std::vector<int>& ids = {});

}  // namespace ergolab::acc
