#pragma once

#include <cstdint>
#include <optional>

#include "memlab/matrix.hpp"

namespace memlab::embeddings {

enum class Kind { identity, coupled_rotation, random_orthonormal };

const char* kind_name(Kind k);

/// Orthonormal key/value embedding matrices: e holds the subject-relation
/// embeddings as columns, e_til the object embeddings. Both are K x K.
struct EmbeddingPair {
    Matrix e;
    Matrix e_til;
    Kind kind = Kind::identity;
    std::optional<std::uint64_t> seed;

    int k() const { return e.cols; }
};

// E = E~ = I_K.
EmbeddingPair identity_embeddings(int k);

// Euler-style 3x3 rotation; R^T R = I by construction.
Matrix rotation_block(double a, double b, double c);

// Support-coupled pair built from 3x3 rotation blocks along the diagonal.
// Requires k divisible by 3.
EmbeddingPair coupled_embeddings(int k);

// Independent orthonormal matrices from a seeded generator.
// PRNG: std::mt19937_64 seeded directly, gaussians via Box-Muller on
// 53-bit uniforms, then modified Gram-Schmidt with one re-orthogonalization
// pass. Deterministic for a given seed across platforms.
EmbeddingPair random_orthonormal(int k, std::uint64_t seed);

} // namespace memlab::embeddings
