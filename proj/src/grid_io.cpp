#include "modspace/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace modspace {

namespace {

using nlohmann::json;

void put_le(double v, char* out) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int b = 0; b < 8; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
}

double get_le(const char* in) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[b])) << (8 * b);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_grid(const std::filesystem::path& header, const GridFunction& f) {
  std::filesystem::path data = header;
  data.replace_extension(".c128");
  const GridSpec& spec = f.spec();
  std::vector<char> bytes(static_cast<std::size_t>(spec.points()) * 16);
  for (Index n = 0; n < spec.points(); ++n) {
    put_le(f.samples()[n].real(), &bytes[16 * n]);
    put_le(f.samples()[n].imag(), &bytes[16 * n + 8]);
  }
  std::ofstream bin(data, std::ios::binary);
  bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!bin) throw InvalidArgument("cannot write " + data.string());

  const json h = {{"version", 1},
                  {"L", spec.length()},
                  {"N", spec.points()},
                  {"dtype", "c128"},
                  {"data", data.filename().string()}};
  std::ofstream out(header);
  out << h.dump(2) << '\n';
  if (!out) throw InvalidArgument("cannot write " + header.string());
}

GridFunction read_grid(const std::filesystem::path& header) {
  std::ifstream in(header);
  if (!in) throw InvalidArgument("cannot open " + header.string());
  json h;
  try {
    h = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed grid header " + header.string() + ": " + e.what());
  }
  try {
    if (h.at("version").get<int>() != 1) throw InvalidArgument("unsupported grid file version");
    if (h.at("dtype").get<std::string>() != "c128") throw InvalidArgument("unsupported dtype");
    const GridSpec spec(h.at("L").get<double>(), h.at("N").get<Index>());
    const std::filesystem::path data = header.parent_path() / h.at("data").get<std::string>();
    std::ifstream bin(data, std::ios::binary);
    if (!bin) throw InvalidArgument("missing sidecar " + data.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    if (bytes.size() != static_cast<std::size_t>(spec.points()) * 16)
      throw InvalidArgument("sidecar " + data.string() + " does not hold N complex128 samples");
    CVector s(spec.points());
    for (Index n = 0; n < spec.points(); ++n) s[n] = Complex(get_le(&bytes[16 * n]), get_le(&bytes[16 * n + 8]));
    return GridFunction::from_samples(spec, std::move(s));
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed grid header " + header.string() + ": " + e.what());
  }
}

}  // namespace modspace
