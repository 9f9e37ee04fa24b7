#include <benchmark/benchmark.h>

#include "remctl/entropy.hpp"
#include "remctl/frame.hpp"
#include "remctl/protocol.hpp"
#include "remctl/randtest.hpp"
#include "remctl/registry.hpp"

using namespace remctl;

static void BM_OtpEncrypt(benchmark::State& state) {
  const auto mode = static_cast<CipherMode>(state.range(0));
  const auto frame = CommandRegistry::defaults().at("Forward");
  const auto key = EntropySource::seeded(1).fill(key_length(mode));
  std::uint32_t addr = 0;
  for (auto _ : state) benchmark::DoNotOptimize(otp_encrypt(frame, key, {addr++}, mode));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OtpEncrypt)->Arg(static_cast<int>(CipherMode::full))->Arg(static_cast<int>(CipherMode::selective));

static void BM_Session(benchmark::State& state) {
  const auto frames = static_cast<std::uint32_t>(state.range(0));
  const std::vector<CommandFrame> script(frames, CommandRegistry::defaults().at("Forward"));
  for (auto _ : state) {
    state.PauseTiming();
    auto src = EntropySource::seeded(2);
    auto [a, b] = charge(src, kFullBlockSize, frames);
    Controller ctrl(std::move(a));
    Controlee clee(std::move(b));
    state.ResumeTiming();
    benchmark::DoNotOptimize(run_session(ctrl, clee, script, {0.2, 0.05, TamperModel::flip_one_random_byte, 3}));
  }
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_Session)->Arg(10'000)->Unit(benchmark::kMillisecond);

// includes bit expansion; the ones count is taken there
static void BM_Monobit(benchmark::State& state) {
  const auto bytes = EntropySource::seeded(4).fill(static_cast<std::size_t>(state.range(0)) / 8);
  for (auto _ : state) benchmark::DoNotOptimize(monobit_frequency(BitSequence::from_bytes(bytes)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Monobit)->Arg(100'000)->Arg(1'000'000);

static void BM_Runs(benchmark::State& state) {
  const auto bits = BitSequence::from_bytes(EntropySource::seeded(5).fill(static_cast<std::size_t>(state.range(0)) / 8));
  for (auto _ : state) benchmark::DoNotOptimize(nist_runs(bits));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Runs)->Arg(1'000'000);

static void BM_Autocorrelation(benchmark::State& state) {
  const auto bits = BitSequence::from_bytes(EntropySource::seeded(6).fill(125'000));
  const auto lag = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(autocorrelation(bits, lag));
}
BENCHMARK(BM_Autocorrelation)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_StoreSerialize(benchmark::State& state) {
  auto src = EntropySource::seeded(7);
  const auto store = charge(src, kFullBlockSize, static_cast<std::uint32_t>(state.range(0))).first;
  for (auto _ : state) benchmark::DoNotOptimize(SksStore::deserialize(store.serialize()));
  state.SetBytesProcessed(state.iterations() * state.range(0) * 32);
}
BENCHMARK(BM_StoreSerialize)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
