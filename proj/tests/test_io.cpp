#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bsphere/cvs.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/io.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/snake.hpp"

using namespace bsphere;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("bsphere_test_io_" + name);
}

}  // namespace

TEST(Io, SnakeRoundTrip) {
    auto h = sample_snake(64, 9);
    auto path = temp_file("snake.json");
    io::write_snake(path, h);
    EXPECT_EQ(io::read_snake(path), h);
    fs::remove(path);

    auto j = io::snake_to_json(h);
    j["f"][3] = -1.0;
    EXPECT_THROW(io::snake_from_json(j), ParameterError);
    EXPECT_THROW(io::read_snake(temp_file("missing.json")), IoError);
}

TEST(Io, MatrixRoundTripIsExact) {
    auto h = sample_snake(256, 4);
    auto d = sphere_matrix(h, select_sample(h, 40));
    auto path = temp_file("matrix.bin");
    io::write_matrix(path, d);
    auto back = io::read_matrix(path);
    EXPECT_EQ(back.m, d.m);
    EXPECT_EQ(back.points, d.points);
    EXPECT_EQ(back.values, d.values);

    // Trailing garbage and truncation are rejected.
    {
        std::ofstream out(path, std::ios::binary | std::ios::app);
        out.put('x');
    }
    EXPECT_THROW(io::read_matrix(path), IoError);
    fs::resize_file(path, 20);
    EXPECT_THROW(io::read_matrix(path), IoError);
    fs::remove(path);
}

TEST(Io, MarksSidecar) {
    auto h = sample_snake(256, 5);
    auto s = assemble_marked(h, sphere_matrix(h, select_sample(h, 30)));
    auto j = io::marks_to_json(s);
    auto back = io::marked_from(s.dist, j);
    EXPECT_EQ(back.i0, s.i0);
    EXPECT_EQ(back.i1, s.i1);
    EXPECT_EQ(back.mass, s.mass);
    EXPECT_EQ(back.epsilon, s.epsilon);
    j.erase("epsilon");
    EXPECT_FALSE(io::marked_from(s.dist, j).epsilon.has_value());
    j["i1"] = 999;
    EXPECT_THROW(io::marked_from(s.dist, j), IoError);
}

TEST(Io, TreeAndMapRoundTrip) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto t = cvs::sample_uniform(7, seed);
        EXPECT_EQ(io::tree_from_json(io::tree_to_json(t)), t);
        auto q = cvs::cvs_forward(t, seed % 2 ? 1 : -1);
        auto back = io::map_from_json(io::map_to_json(q));
        EXPECT_EQ(back.half_edges, q.half_edges);
        EXPECT_EQ(back.root, q.root);
        EXPECT_EQ(back.pointed, q.pointed);
    }
    EXPECT_ANY_THROW(io::tree_from_json(nlohmann::json::parse("[1]")));
    EXPECT_ANY_THROW(io::tree_from_json(nlohmann::json::parse("[0, [3]]")));
}
