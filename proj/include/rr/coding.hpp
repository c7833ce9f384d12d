#pragma once
#include <cstdint>
#include <vector>

#include "rr/permutation.hpp"

namespace rr {

// Back-and-forth pairing code: even rounds pair the least unpaired argument,
// odd rounds the least unpaired value; c_k is the partner's position among
// the still unpaired candidates on its side.
std::vector<std::uint64_t> encode_permutation(const Permutation& p, std::uint64_t k);

// Inverse of encode on its rounds; unpaired arguments are matched to unpaired
// values order-preservingly.
Perm decode_permutation(const std::vector<std::uint64_t>& code);

}  // namespace rr
