#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "properties.hpp"

using namespace smatv::testing;

namespace {

void require_none(const Failures& f) {
    for (std::size_t i = 0; i < f.size() && i < 5; ++i) MESSAGE(f[i]);
    CHECK(f.empty());
}

}  // namespace

TEST_CASE("pad insertion is linear in dB") { require_none(check_pad_linearity(101, 1000)); }
TEST_CASE("C/N is monotone") { require_none(check_cnr_monotonic(202, 1000)); }
TEST_CASE("combine_cnr") { require_none(check_combine_cnr(303, 1000)); }
TEST_CASE("counting identity") { require_none(check_counting_identity(404, 300)); }
TEST_CASE("document round trip") { require_none(check_round_trip(505, 50)); }
TEST_CASE("optimizer determinism") { require_none(check_optimizer_determinism(606, 10)); }
