#include "cqdd/rng.hpp"

namespace cqdd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_key(std::uint64_t master, StreamTag tag,
                      std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  for (std::uint64_t v : indices) h = splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
  // Mixing in the index count separates {a} from {a, 0}.
  return splitmix64(h ^ indices.size());
}

Rng::Rng(std::uint64_t master, StreamTag tag, std::initializer_list<std::uint64_t> indices)
    : engine_(mix_key(master, tag, indices)) {}

}  // namespace cqdd
