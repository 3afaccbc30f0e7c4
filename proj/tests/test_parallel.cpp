#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>

#include "exitlab/parallel.hpp"

using exitlab::parallel_map;
using exitlab::resolve_threads;

TEST(ParallelMap, ResultsInIndexOrder) {
    for (unsigned threads : {1u, 2u, 7u}) {
        const auto out = parallel_map(100, threads, [](std::size_t i) { return i * i; });
        ASSERT_EQ(out.size(), 100u);
        for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
    }
}

TEST(ParallelMap, LowestFailingIndexIsRethrown) {
    auto fn = [](std::size_t i) -> int {
        if (i == 3 || i == 11) throw std::runtime_error(std::to_string(i));
        return 0;
    };
    for (unsigned threads : {1u, 4u}) {
        try {
            parallel_map(20, threads, fn);
            FAIL() << "expected an exception";
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "3");
        }
    }
}

TEST(ParallelMap, EmptyRange) { EXPECT_TRUE(parallel_map(0, 4, [](std::size_t) { return 1; }).empty()); }

TEST(ResolveThreads, ExplicitBeatsEnvironment) {
    setenv("EXITLAB_THREADS", "3", 1);
    EXPECT_EQ(resolve_threads(5), 5u);
    EXPECT_EQ(resolve_threads(0), 3u);
    setenv("EXITLAB_THREADS", "junk", 1);
    EXPECT_GE(resolve_threads(0), 1u);
    unsetenv("EXITLAB_THREADS");
    EXPECT_GE(resolve_threads(0), 1u);
}
