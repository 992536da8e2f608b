#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace hacl {

// Every stochastic component owns one engine. Distributions are constructed
// per draw so that the engine alone is the complete stream state.
using Rng = std::mt19937_64;

// Seed for a named substream of a run. Adding a new label never changes the
// seeds produced for existing labels.
std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view label);

Rng make_stream(std::uint64_t root_seed, std::string_view label);

double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
double normal(Rng& rng, double mean, double stddev);
double beta(Rng& rng, double a, double b);

std::string serialize_rng(const Rng& rng);
Rng deserialize_rng(const std::string& text);

}  // namespace hacl
