// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/wav.hpp"

namespace fs = std::filesystem;

namespace gvae {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTargetRms = 0.05;  // about -26 dBFS

struct Vowel {
  double f1, f2, f3;
};

// Adult male averages.
constexpr Vowel kVowels[] = {
    {270, 2290, 3010}, {390, 1990, 2550}, {530, 1840, 2480},
    {660, 1720, 2410}, {730, 1090, 2440}, {570, 840, 2410},
    {440, 1020, 2240}, {300, 870, 2240},  {640, 1190, 2390},
    {490, 1350, 1690},
};

// Second-order resonator with unit gain at DC.
class Resonator {
 public:
  void Set(double freq, double bw, double fs) {
    const double r = std::exp(-kPi * bw / fs);
    a1_ = 2.0 * r * std::cos(2.0 * kPi * freq / fs);
    a2_ = -r * r;
    b_ = 1.0 - a1_ - a2_;
  }
  double Step(double x) {
    const double y = b_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, b_ = 1, y1_ = 0, y2_ = 0;
};

// Per-sample control tracks.
struct Tracks {
  std::vector<double> voice, fric, fric_freq, f0, f1, f2, f3;

  explicit Tracks(std::size_t n)
      : voice(n, 0.0), fric(n, 0.0), fric_freq(n, 4000.0), f0(n, 100.0),
        f1(n, 500.0), f2(n, 1500.0), f3(n, 2500.0) {}
  std::size_t size() const { return voice.size(); }
};

double Ramp(std::size_t i, std::size_t len, std::size_t edge) {
  const double e = static_cast<double>(std::min(edge, len / 2));
  if (e <= 0) return 1.0;
  const double d = static_cast<double>(std::min(i, len - 1 - i));
  if (d >= e) return 1.0;
  return 0.5 - 0.5 * std::cos(kPi * d / e);
}

void Normalize(std::vector<double> &x, const std::vector<double> *activity) {
  double ss = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (activity != nullptr && (*activity)[i] < 0.1) continue;
    ss += x[i] * x[i];
    ++count;
  }
  if (count == 0 || ss <= 0.0) return;
  double k = kTargetRms / std::sqrt(ss / static_cast<double>(count));
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak * k > 0.9) k = 0.9 / peak;
  for (double &v : x) v *= k;
}

class PinkFilter {
 public:
  double Step(double w) {
    b0_ = 0.99886 * b0_ + w * 0.0555179;
    b1_ = 0.99332 * b1_ + w * 0.0750759;
    b2_ = 0.96900 * b2_ + w * 0.1538520;
    b3_ = 0.86650 * b3_ + w * 0.3104856;
    b4_ = 0.55000 * b4_ + w * 0.5329522;
    b5_ = -0.7616 * b5_ - w * 0.0168980;
    const double y = b0_ + b1_ + b2_ + b3_ + b4_ + b5_ + b6_ + w * 0.5362;
    b6_ = w * 0.115926;
    return y;
  }

 private:
  double b0_ = 0, b1_ = 0, b2_ = 0, b3_ = 0, b4_ = 0, b5_ = 0, b6_ = 0;
};

}  // namespace

SpeakerProfile DrawSpeaker(std::uint64_t seed) {
  std::mt19937_64 rng(SplitMix64(seed));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpeakerProfile p;
  const bool high = u(rng) < 0.5;
  p.f0 = high ? 170.0 + 70.0 * u(rng) : 90.0 + 50.0 * u(rng);
  p.formant_scale = high ? 1.12 + 0.1 * u(rng) : 0.92 + 0.12 * u(rng);
  p.rate = 0.8 + 0.4 * u(rng);
  p.breathiness = 0.02 + 0.08 * u(rng);
  p.tilt = 0.85 + 0.1 * u(rng);
  return p;
}

Waveform SynthesizeSpeech(const SpeakerProfile &spk, double seconds,
                          std::uint64_t seed, int sample_rate) {
  if (seconds <= 0.0 || sample_rate <= 0)
    Fail(ErrorCode::kInvalidArgument, "speech duration must be positive");
  const double fs = sample_rate;
  const auto total = static_cast<std::size_t>(seconds * fs);
  std::mt19937_64 rng(SplitMix64(seed ^ 0x5eedULL));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto samples = [&](double sec) { return static_cast<std::size_t>(sec * fs); };

  Tracks t(total);
  std::size_t pos = samples(0.15 + 0.25 * u(rng));
  const std::size_t stop = total > samples(0.3) ? total - samples(0.2 + 0.1 * u(rng)) : 0;
  Vowel prev = kVowels[rng() % std::size(kVowels)];
  const double sc = spk.formant_scale;

  auto set_formants = [&](std::size_t a, std::size_t b, const Vowel &from,
                          const Vowel &to) {
    const std::size_t glide = std::min<std::size_t>(samples(0.04), b - a);
    for (std::size_t i = a; i < b && i < total; ++i) {
      const double w = glide == 0 ? 1.0
                       : std::min(1.0, static_cast<double>(i - a) /
                                           static_cast<double>(glide));
      t.f1[i] = sc * (from.f1 + w * (to.f1 - from.f1));
      t.f2[i] = sc * (from.f2 + w * (to.f2 - from.f2));
      t.f3[i] = sc * (from.f3 + w * (to.f3 - from.f3));
    }
  };

  while (pos < stop) {
    const int syllables = 1 + static_cast<int>(rng() % 3);
    const double accent = 1.0 + 0.15 * (u(rng) - 0.3);
    for (int s = 0; s < syllables && pos < stop; ++s) {
      // Onset consonant.
      const double c = u(rng);
      if (c < 0.35) {  // fricative
        const std::size_t len = samples((0.06 + 0.07 * u(rng)) / spk.rate);
        const double freq = sc * (2500.0 + 3500.0 * u(rng));
        const double amp = 0.25 + 0.35 * u(rng);
        for (std::size_t i = 0; i < len && pos + i < total; ++i) {
          t.fric[pos + i] = amp * Ramp(i, len, samples(0.01));
          t.fric_freq[pos + i] = freq;
        }
        pos += len;
      } else if (c < 0.6) {  // stop: closure then burst
        pos += samples((0.03 + 0.03 * u(rng)) / spk.rate);
        const std::size_t len = samples(0.015);
        const double freq = sc * (1500.0 + 2500.0 * u(rng));
        for (std::size_t i = 0; i < len && pos + i < total; ++i) {
          t.fric[pos + i] = 0.6 * Ramp(i, len, samples(0.003));
          t.fric_freq[pos + i] = freq;
        }
        pos += len;
      } else if (c < 0.75) {  // nasal
        const std::size_t len = samples((0.05 + 0.04 * u(rng)) / spk.rate);
        const Vowel nasal{250, 1100 + 600 * u(rng), 2300};
        set_formants(pos, std::min(pos + len, total), prev, nasal);
        for (std::size_t i = 0; i < len && pos + i < total; ++i)
          t.voice[pos + i] = 0.3 * Ramp(i, len, samples(0.01));
        prev = nasal;
        pos += len;
      }
      if (pos >= stop) break;
      // Vowel nucleus.
      const Vowel v = kVowels[rng() % std::size(kVowels)];
      const std::size_t len = samples((0.09 + 0.14 * u(rng)) / spk.rate);
      const std::size_t end = std::min(pos + len, total);
      set_formants(pos, end, prev, v);
      const double amp = (s == 0 ? 1.0 : 0.7 + 0.3 * u(rng));
      for (std::size_t i = pos; i < end; ++i) {
        const double tau = static_cast<double>(i - pos) / static_cast<double>(len);
        t.voice[i] = std::max(t.voice[i], amp * Ramp(i - pos, len, samples(0.025)));
        // Declination over the utterance, a rise-fall accent per syllable.
        const double decl = 1.0 - 0.15 * static_cast<double>(i) / static_cast<double>(total);
        const double bump = s == 0 ? (accent - 1.0) * std::sin(kPi * tau) : 0.0;
        t.f0[i] = spk.f0 * decl * (1.0 + bump);
      }
      prev = v;
      pos = end;
    }
    // Inter-word gap; longer phrase breaks now and then.
    const double g = u(rng);
    if (g < 0.15)
      pos += samples(0.25 + 0.25 * u(rng));
    else if (g < 0.55)
      pos += samples(0.04 + 0.12 * u(rng));
  }
  // Hold formants and pitch through silent stretches.
  for (std::size_t i = 1; i < total; ++i) {
    if (t.voice[i] == 0.0 && t.fric[i] == 0.0) {
      t.f0[i] = t.f0[i - 1];
    }
  }

  std::vector<double> out(total, 0.0);
  Resonator r1, r2, r3, r4, rf;
  double phase = 0.0, jitter = 0.0, lp1 = 0.0, lp2 = 0.0, prev_src = 0.0;
  double fric_prev = 0.0;
  const std::size_t block = 32;
  for (std::size_t i = 0; i < total; ++i) {
    if (i % block == 0) {
      r1.Set(t.f1[i], 60.0 + 0.05 * t.f1[i], fs);
      r2.Set(t.f2[i], 80.0 + 0.04 * t.f2[i], fs);
      r3.Set(t.f3[i], 120.0, fs);
      r4.Set(3500.0 * sc, 250.0, fs);
      rf.Set(std::min(t.fric_freq[i], 0.45 * fs), 0.25 * t.fric_freq[i], fs);
      jitter = 0.98 * jitter + 0.02 * gauss(rng);
    }
    // Glottal pulse train, spectrally tilted.
    const double f0 = t.f0[i] * (1.0 + 0.02 * jitter);
    phase += f0 / fs;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    lp1 = spk.tilt * lp1 + (1.0 - spk.tilt) * pulse;
    lp2 = spk.tilt * lp2 + (1.0 - spk.tilt) * lp1;
    double src = (lp2 - prev_src) * 40.0;  // lip radiation
    prev_src = lp2;
    src += spk.breathiness * gauss(rng) * 0.05;
    const double voiced =
        r4.Step(r3.Step(r2.Step(r1.Step(src * t.voice[i]))));

    double fric = 0.0;
    if (t.fric[i] > 0.0) {
      const double w = gauss(rng);
      fric = rf.Step(w - fric_prev) * t.fric[i] * 0.08;
      fric_prev = w;
    } else {
      rf.Step(0.0);
    }
    out[i] = voiced + fric;
  }

  std::vector<double> activity(total);
  for (std::size_t i = 0; i < total; ++i)
    activity[i] = std::max(t.voice[i], t.fric[i]);
  Normalize(out, &activity);
  // Recording floor, about one 16-bit LSB.
  for (double &v : out) v += 3e-5 * gauss(rng);
  return Waveform{std::move(out), sample_rate};
}

const char *NoiseFamilyName(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::kPink: return "pink";
    case NoiseFamily::kHum: return "hum";
    case NoiseFamily::kBabble: return "babble";
    case NoiseFamily::kTraffic: return "traffic";
    case NoiseFamily::kClatter: return "clatter";
    case NoiseFamily::kWind: return "wind";
  }
  return "?";
}

std::vector<NoiseFamily> AllNoiseFamilies() {
  return {NoiseFamily::kPink, NoiseFamily::kHum, NoiseFamily::kBabble,
          NoiseFamily::kTraffic, NoiseFamily::kClatter, NoiseFamily::kWind};
}

NoiseFamily ParseNoiseFamily(const std::string &name) {
  for (NoiseFamily f : AllNoiseFamilies())
    if (name == NoiseFamilyName(f)) return f;
  Fail(ErrorCode::kInvalidArgument, "unknown noise family: " + name);
}

Waveform SynthesizeNoise(NoiseFamily family, double seconds, std::uint64_t seed,
                         int sample_rate) {
  if (seconds <= 0.0 || sample_rate <= 0)
    Fail(ErrorCode::kInvalidArgument, "noise duration must be positive");
  const double fs = sample_rate;
  const auto n = static_cast<std::size_t>(seconds * fs);
  std::mt19937_64 rng(SplitMix64(seed ^ 0x2015eULL));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n, 0.0);

  switch (family) {
    case NoiseFamily::kPink: {
      PinkFilter pf;
      for (double &v : x) v = pf.Step(gauss(rng));
      break;
    }
    case NoiseFamily::kHum: {
      const double f0 = 50.0 + 100.0 * u(rng);
      const int harmonics = 12 + static_cast<int>(rng() % 12);
      std::vector<double> amp(harmonics), ph(harmonics);
      for (int k = 0; k < harmonics; ++k) {
        amp[k] = (0.5 + u(rng)) / (k + 1);
        ph[k] = 2.0 * kPi * u(rng);
      }
      const double am_rate = 0.2 + 0.8 * u(rng);
      double lp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double time = static_cast<double>(i) / fs;
        double h = 0.0;
        for (int k = 0; k < harmonics; ++k) {
          const double f = f0 * (k + 1);
          if (f >= 0.45 * fs) break;
          h += amp[k] * std::sin(2.0 * kPi * f * time + ph[k]);
        }
        lp = 0.9 * lp + 0.1 * gauss(rng);
        x[i] = h * (1.0 + 0.2 * std::sin(2.0 * kPi * am_rate * time)) + 0.6 * lp;
      }
      break;
    }
    case NoiseFamily::kBabble: {
      const int talkers = 5 + static_cast<int>(rng() % 4);
      for (int k = 0; k < talkers; ++k) {
        const SpeakerProfile spk = DrawSpeaker(DeriveSeed(seed, 7001, k));
        std::size_t at = 0;
        std::uint64_t piece = 0;
        while (at < n) {
          const Waveform w = SynthesizeSpeech(
              spk, 3.0 + 3.0 * u(rng), DeriveSeed(seed, 7002 + k, piece++),
              sample_rate);
          for (std::size_t i = 0; i < w.samples.size() && at + i < n; ++i)
            x[at + i] += w.samples[i];
          at += w.samples.size();
        }
      }
      break;
    }
    case NoiseFamily::kTraffic: {
      double brown = 0.0, lp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        brown = 0.995 * brown + 0.1 * gauss(rng);
        x[i] = brown;
      }
      // Passing vehicles: lowpassed noise under Gaussian envelopes.
      const double rate = 0.2 + 0.3 * u(rng);
      double at = 0.0;
      const double dur = static_cast<double>(n) / fs;
      std::exponential_distribution<double> gap(rate);
      while ((at += gap(rng)) < dur) {
        const double width = 1.0 + 2.0 * u(rng);
        const double level = 1.0 + 2.0 * u(rng);
        const double cut = 0.8 + 0.15 * u(rng);
        const auto a = static_cast<std::size_t>(std::max(0.0, at - 3 * width) * fs);
        const auto b = std::min(n, static_cast<std::size_t>((at + 3 * width) * fs));
        lp = 0.0;
        for (std::size_t i = a; i < b; ++i) {
          const double d = (static_cast<double>(i) / fs - at) / width;
          lp = cut * lp + (1.0 - cut) * gauss(rng);
          x[i] += level * std::exp(-0.5 * d * d) * lp * 3.0;
        }
      }
      break;
    }
    case NoiseFamily::kClatter: {
      PinkFilter pf;
      for (double &v : x) v = 0.3 * pf.Step(gauss(rng));
      const double rate = 2.0 + 4.0 * u(rng);
      std::exponential_distribution<double> gap(rate);
      const double dur = static_cast<double>(n) / fs;
      double at = 0.0;
      while ((at += gap(rng)) < dur) {
        const double freq = 1000.0 + 4000.0 * u(rng);
        const double decay = 0.02 + 0.06 * u(rng);
        const double level = 0.5 + 1.5 * u(rng);
        const auto a = static_cast<std::size_t>(at * fs);
        const auto b = std::min(n, a + static_cast<std::size_t>(5 * decay * fs));
        for (std::size_t i = a; i < b; ++i) {
          const double time = static_cast<double>(i - a) / fs;
          x[i] += level * std::exp(-time / decay) * std::sin(2.0 * kPi * freq * time);
        }
      }
      break;
    }
    case NoiseFamily::kWind: {
      // Lowpassed noise with a wandering cutoff and gusts.
      double lp1 = 0.0, lp2 = 0.0, cut = 0.95, gust = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 256 == 0) {
          cut = std::clamp(cut + 0.004 * gauss(rng), 0.85, 0.995);
          gust = std::clamp(gust + 0.05 * gauss(rng), 0.2, 2.5);
        }
        lp1 = cut * lp1 + (1.0 - cut) * gauss(rng);
        lp2 = cut * lp2 + (1.0 - cut) * lp1;
        x[i] = gust * lp2;
      }
      break;
    }
  }
  Normalize(x, nullptr);
  return Waveform{std::move(x), sample_rate};
}

DatasetManifest GenerateSources(const std::string &out_dir,
                                const SourceOptions &o) {
  if (o.min_seconds <= 0.0 || o.max_seconds < o.min_seconds)
    Fail(ErrorCode::kInvalidArgument, "bad utterance duration range");
  if (o.snrs.empty()) Fail(ErrorCode::kInvalidArgument, "no SNRs given");
  if (o.train_noise.empty() || o.test_noise.empty())
    Fail(ErrorCode::kInvalidArgument, "noise family lists must be non-empty");
  for (NoiseFamily a : o.train_noise)
    for (NoiseFamily b : o.test_noise)
      if (a == b)
        Fail(ErrorCode::kInvalidArgument,
             std::string("noise type in both train and test: ") + NoiseFamilyName(a));
  if (o.speakers_train < 1 || o.speakers_valid < 1 || o.speakers_test < 1 ||
      o.noise_instances < 1)
    Fail(ErrorCode::kInvalidArgument, "speaker and noise counts must be >= 1");
  fs::create_directories(fs::path(out_dir) / "speech");
  fs::create_directories(fs::path(out_dir) / "noise");

  struct SpeechJob {
    Split split;
    int speaker;
    double seconds;
    std::string path;
  };
  struct NoiseJob {
    Split split;
    NoiseFamily family;
    int instance;
    std::string path;
  };
  std::vector<SpeechJob> speech;
  std::vector<NoiseJob> noise;
  std::mt19937_64 rng(SplitMix64(o.seed));
  std::uniform_real_distribution<double> dur(o.min_seconds, o.max_seconds);

  const Split splits[] = {Split::kTrain, Split::kValid, Split::kTest};
  int speaker_base = 0;
  for (Split s : splits) {
    const int speakers = s == Split::kTrain   ? o.speakers_train
                         : s == Split::kValid ? o.speakers_valid
                                              : o.speakers_test;
    double budget = s == Split::kTrain ? o.train_minutes * 60.0
                    : s == Split::kValid ? o.valid_minutes * 60.0
                                         : 0.0;
    int count = 0;
    while (s == Split::kTest ? count < o.test_utterances : budget > 0.0) {
      SpeechJob j{s, speaker_base + count % speakers, dur(rng), ""};
      char name[96];
      std::snprintf(name, sizeof name, "speech/%s_spk%03d_%05d.wav",
                    SplitName(s), j.speaker, count);
      j.path = name;
      budget -= j.seconds;
      speech.push_back(j);
      ++count;
    }
    speaker_base += speakers;
    for (NoiseFamily f : s == Split::kTest ? o.test_noise : o.train_noise) {
      for (int k = 0; k < o.noise_instances; ++k) {
        char name[96];
        std::snprintf(name, sizeof name, "noise/%s_%s_%d.wav", SplitName(s),
                      NoiseFamilyName(f), k);
        noise.push_back({s, f, k, name});
      }
    }
  }

  const fs::path root(out_dir);
  ParallelFor(speech.size() + noise.size(), o.jobs, [&](std::size_t i) {
    if (i < speech.size()) {
      const SpeechJob &j = speech[i];
      const SpeakerProfile spk =
          DrawSpeaker(DeriveSeed(o.seed, 1, static_cast<std::uint64_t>(j.speaker)));
      WriteWav((root / j.path).string(),
               SynthesizeSpeech(spk, j.seconds, DeriveSeed(o.seed, 2, i),
                                o.sample_rate));
    } else {
      const NoiseJob &j = noise[i - speech.size()];
      WriteWav((root / j.path).string(),
               SynthesizeNoise(j.family, o.noise_seconds,
                               DeriveSeed(o.seed, 3, i - speech.size()),
                               o.sample_rate));
    }
  });

  DatasetManifest m;
  std::size_t test_index = 0;
  for (std::size_t i = 0; i < speech.size(); ++i) {
    const SpeechJob &j = speech[i];
    std::vector<const NoiseJob *> pool;
    for (const NoiseJob &nj : noise)
      if (nj.split == j.split) pool.push_back(&nj);
    ManifestRecord r;
    r.clean_path = j.path;
    r.noise_path = pool[rng() % pool.size()]->path;
    r.noise_offset = -1;
    r.snr_db = j.split == Split::kTest ? o.snrs[test_index++ % o.snrs.size()]
                                       : o.snrs[rng() % o.snrs.size()];
    r.split = j.split;
    r.rng_seed = DeriveSeed(o.seed, 4, i);
    m.records.push_back(r);
  }
  // Paths in the file are relative to it; the returned copy is absolute.
  WriteManifest((root / "sources.tsv").string(), m);
  for (ManifestRecord &r : m.records) {
    r.clean_path = (root / r.clean_path).string();
    r.noise_path = (root / r.noise_path).string();
  }
  return m;
}

}  // namespace gvae
