#include <lrexp/bench.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lrexp::bench {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;
constexpr char kMagic[8] = {'L', 'R', 'E', 'X', 'R', 'E', 'F', '1'};

void fnv(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

ReferenceCache::ReferenceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

ReferenceCache ReferenceCache::from_environment() {
  if (const char* env = std::getenv("LOWRANK_EXPINT_CACHE"); env && *env) {
    return ReferenceCache(env);
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return ReferenceCache(std::filesystem::path(home) / ".cache" / "lowrank_expint");
  }
  return ReferenceCache(std::filesystem::temp_directory_path() / "lowrank_expint");
}

std::string ReferenceCache::key(const std::string& description, const std::vector<double>& grid) {
  std::uint64_t h = kFnvOffset;
  fnv(h, description.data(), description.size());
  for (double t : grid) {
    fnv(h, &t, sizeof t);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<std::vector<Matrix>> ReferenceCache::load(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".bin"), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint64_t count = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0 ||
      !in.read(reinterpret_cast<char*>(&count), sizeof count)) {
    return std::nullopt;
  }
  std::vector<Matrix> mats;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::int64_t rows = 0, cols = 0;
    if (!in.read(reinterpret_cast<char*>(&rows), sizeof rows) ||
        !in.read(reinterpret_cast<char*>(&cols), sizeof cols) || rows < 0 || cols < 0) {
      return std::nullopt;
    }
    Matrix M(rows, cols);
    if (!in.read(reinterpret_cast<char*>(M.data()),
                 static_cast<std::streamsize>(sizeof(double) * M.size()))) {
      return std::nullopt;
    }
    mats.push_back(std::move(M));
  }
  return mats;
}

void ReferenceCache::store(const std::string& key, const std::vector<Matrix>& mats) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) return;  // caching is best effort
  const auto final_path = dir_ / (key + ".bin");
  const auto tmp_path = dir_ / (key + ".bin.tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out.write(kMagic, 8);
    const std::uint64_t count = mats.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (const auto& M : mats) {
      const std::int64_t rows = M.rows(), cols = M.cols();
      out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
      out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
      out.write(reinterpret_cast<const char*>(M.data()),
                static_cast<std::streamsize>(sizeof(double) * M.size()));
    }
    if (!out) return;
  }
  std::filesystem::rename(tmp_path, final_path, ec);
}

}  // namespace lrexp::bench
