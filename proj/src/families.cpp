#include "modspace/families.hpp"

#include <cmath>
#include <random>

#include "modspace/freqdecomp.hpp"

namespace modspace {

Complex WavePacket::spectrum(double xi) const {
  const double d = xi - xi0;
  return amplitude * (width * std::sqrt(2.0 * kPi) * std::exp(-0.5 * width * width * d * d)) *
         std::polar(1.0, -d * x0);
}

NamedSpectrum packet_sum(std::string id, std::vector<WavePacket> packets, double band) {
  return {std::move(id), [packets = std::move(packets), band](double xi) {
            const double cut = std::isinf(band) ? 1.0 : smooth_step(band - std::abs(xi));
            if (cut == 0.0) return Complex(0.0);
            Complex acc(0.0);
            for (const auto& p : packets) acc += p.spectrum(xi);
            return cut * acc;
          }};
}

std::vector<WavePacket> random_packets(std::uint64_t seed, int count, double lo, double hi, double spread,
                                       double w_lo, double w_hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(lo, hi), pos(-spread, spread), width(w_lo, w_hi);
  std::normal_distribution<double> amp;
  std::vector<WavePacket> out;
  for (int i = 0; i < count; ++i) {
    WavePacket p;
    p.xi0 = centre(rng);
    p.x0 = pos(rng);
    p.width = width(rng);
    p.amplitude = Complex(amp(rng), amp(rng));
    out.push_back(p);
  }
  return out;
}

std::vector<NamedSpectrum> standard_family(std::uint64_t seed, int count, double band) {
  std::vector<NamedSpectrum> family;
  family.push_back(packet_sum("gaussian", {WavePacket{}}, kInf));
  const double shifts[] = {5.0, -12.0, 0.75 * band};
  for (double s : shifts) {
    if (static_cast<int>(family.size()) >= count) break;
    WavePacket p;
    p.xi0 = s;
    family.push_back(packet_sum("modulated_" + std::to_string(static_cast<int>(s)), {p}, band));
  }
  const double bands[] = {4.0, 8.0, 16.0, band};
  for (int i = 0; static_cast<int>(family.size()) < count; ++i) {
    const double k = bands[i % 4];
    family.push_back(packet_sum("random_" + std::to_string(i), random_packets(seed + 1000 * i, 4, -k, k), k));
  }
  return family;
}

}  // namespace modspace
