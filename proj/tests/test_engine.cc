#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bqs/engine.h"
#include "bqs/errors.h"

using namespace bqs;

namespace {

SecurityParams params_for(std::int64_t n, std::int64_t ell, std::int64_t m = 0) {
  SecurityParams p;
  p.n = n;
  p.ell = ell;
  p.m = m;
  return p;
}

BitString bs(const char *s) { return BitString::from_string(s); }

std::vector<BitString> all_strings(std::size_t ell) {
  std::vector<BitString> out;
  for (std::uint64_t v = 0; v < (1u << ell); ++v) out.push_back(BitString::from_uint(v, ell));
  return out;
}

}  // namespace

TEST(Ideal, RotHonestGivesChosenString) {
  Rng rng(1, 0);
  for (int i = 0; i < 200; ++i) {
    auto out = run_ideal({FunctionalityKind::ROT, 1, Corruption::None}, {}, rng);
    EXPECT_EQ(out.choice->y, out.strings->at(out.choice->c));
  }
}

TEST(Ideal, RotCorruptReceiverHonorsInput) {
  Rng rng(2, 0);
  int ones = 0;
  const int N = 4000;
  for (int i = 0; i < N; ++i) {
    IdealInputs in;
    in.choice = OtChoice{0, bs("11")};
    auto out = run_ideal({FunctionalityKind::ROT, 2, Corruption::B}, in, rng);
    EXPECT_EQ(out.strings->x0, bs("11"));
    ones += out.strings->x1[0];
  }
  EXPECT_NEAR(ones / double(N), 0.5, 3 * std::sqrt(0.25 / N));
}

TEST(Ideal, RotCorruptSenderKeepsStrings) {
  Rng rng(3, 0);
  IdealInputs in;
  in.strings = OtStrings{bs("01"), bs("10")};
  auto out = run_ideal({FunctionalityKind::ROT, 2, Corruption::A}, in, rng);
  EXPECT_EQ(*out.strings, *in.strings);
  EXPECT_EQ(out.choice->y, in.strings->at(out.choice->c));
}

TEST(Ideal, TorSwapsRoles) {
  Rng rng(4, 0);
  IdealInputs in;
  in.strings = OtStrings{bs("01"), bs("10")};
  EXPECT_NO_THROW(run_ideal({FunctionalityKind::TOR, 2, Corruption::B}, in, rng));
  EXPECT_THROW(run_ideal({FunctionalityKind::TOR, 2, Corruption::A}, in, rng), std::invalid_argument);
}

TEST(Ideal, OtExample) {
  Rng rng(5, 0);
  IdealInputs in;
  in.strings = OtStrings{bs("01"), bs("10")};
  in.c = 1;
  auto out = run_ideal({FunctionalityKind::OT, 2, Corruption::None}, in, rng);
  EXPECT_EQ(out.choice->y, bs("10"));
}

TEST(Ideal, MalformedInputsRejected) {
  Rng rng(6, 0);
  IdealInputs in;
  in.c = 1;
  EXPECT_THROW(run_ideal({FunctionalityKind::ROT, 2, Corruption::None}, in, rng), std::invalid_argument);
  IdealInputs bad_len;
  bad_len.choice = OtChoice{0, bs("1")};
  EXPECT_THROW(run_ideal({FunctionalityKind::ROT, 2, Corruption::B}, bad_len, rng), std::invalid_argument);
  IdealInputs no_c;
  no_c.strings = OtStrings{bs("01"), bs("10")};
  EXPECT_THROW(run_ideal({FunctionalityKind::OT, 2, Corruption::None}, no_c, rng), std::invalid_argument);
}

TEST(Ideal, BitCommitmentPhases) {
  Rng rng(7, 0);
  IdealInputs in;
  in.b = 1;
  in.a = 1;
  EXPECT_EQ(run_ideal({FunctionalityKind::BC, 1, Corruption::None}, in, rng).bc_output, 1);
  in.a = 0;
  EXPECT_EQ(run_ideal({FunctionalityKind::BC, 1, Corruption::None}, in, rng).bc_output, std::nullopt);
  IdealBitCommitment bc;
  EXPECT_THROW(bc.open(1), std::logic_error);
  bc.commit(0);
  EXPECT_THROW(bc.commit(1), std::logic_error);
  EXPECT_EQ(bc.open(1), 0);
  EXPECT_THROW(bc.open(1), std::logic_error);
}

TEST(Transcript, PhasesAreSequential) {
  Transcript t;
  t.begin_phase("outer");
  t.begin_phase("inner", "outer");
  EXPECT_THROW(t.begin_phase("second", "outer"), ConcurrencyViolation);
  EXPECT_THROW(t.end_phase("outer"), ConcurrencyViolation);
  t.end_phase("inner");
  t.begin_phase("second", "outer");
  t.end_phase("second");
  t.end_phase("outer");
  EXPECT_THROW(t.begin_phase("x", "outer"), ConcurrencyViolation);
  EXPECT_TRUE(t.active_phases().empty());
}

TEST(Transcript, JsonlHasExactlyTheSchemaKeys) {
  Rng rng(8, 0);
  auto r = run_bqs_ot(params_for(8, 2), honest_receiver(), rng, {}, 17);
  std::istringstream in(r.transcript.to_jsonl());
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    auto e = parse_json_line(line);
    EXPECT_EQ(e, r.transcript.events()[count]);
    EXPECT_EQ(e.trial, 17u);
    ++count;
  }
  EXPECT_EQ(count, r.transcript.events().size());
  EXPECT_THROW(parse_json_line(R"({"trial":0,"round":0,"channel":"Comm","dir":"","payload_hex":""})"),
               std::invalid_argument);
  EXPECT_THROW(
      parse_json_line(
          R"({"trial":0,"round":0,"channel":"Comm","dir":"","payload_hex":"","event":"","extra":1})"),
      std::invalid_argument);
}

TEST(BqsOt, HonestCorrectnessEverySeed) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed, 1);
    auto r = run_bqs_ot(params_for(16, 2), honest_receiver(), rng);
    ASSERT_TRUE(r.receiver_output);
    EXPECT_EQ(r.receiver_output->y, r.sender_output.at(r.receiver_output->c)) << seed;
  }
}

TEST(BqsOt, TranscriptRecordsMessages) {
  Rng rng(9, 0);
  auto r = run_bqs_ot(params_for(16, 2), honest_receiver(), rng);
  const auto &t = r.transcript;
  auto q = t.find("Q-Comm");
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].dir, "A->B");
  EXPECT_EQ(q[0].event.rfind("qubits n=16", 0), 0u);
  auto c = t.find("Comm");
  ASSERT_EQ(c.size(), 1u);
  // b plus two 2 x 16 seeds, packed into bytes.
  EXPECT_EQ(c[0].payload_hex.size(), 2 * ((16 + 2 * 32 + 7) / 8));
  EXPECT_GT(c[0].round, q[0].round);
  std::uint64_t last = 0;
  for (const auto &e : t.events()) {
    EXPECT_GE(e.round, last);
    last = e.round;
  }
  auto bounds = t.find("Memory", "memory-bound");
  ASSERT_EQ(bounds.size(), 2u);
  EXPECT_NE(bounds[0].event.find("before-step-1"), std::string::npos);
  EXPECT_NE(bounds[1].event.find("before-step-3"), std::string::npos);
  EXPECT_LE(bounds[1].round, c[0].round);
  EXPECT_EQ(t.find("Output").size(), 2u);
  EXPECT_FALSE(r.within_proven_bounds);
}

TEST(BqsOt, EveryRoundBoundAddsEvents) {
  Rng rng(10, 0);
  ProtocolOptions opt;
  opt.bound_every_round = true;
  auto r = run_bqs_ot(params_for(8, 2), honest_receiver(), rng, opt);
  EXPECT_EQ(r.transcript.find("Memory", "memory-bound end-of-round").size(), 2u);
}

TEST(BqsOt, ChoiceAndBasesUniform) {
  const int N = 10000;
  int cs = 0, bits = 0, total_bits = 0;
  for (int i = 0; i < N; ++i) {
    Rng rng(11, i);
    auto r = run_bqs_ot(params_for(8, 1), honest_receiver(), rng);
    cs += r.receiver_output->c;
    // b is the first n bits of the Comm payload.
    auto payload = r.transcript.find("Comm")[0].payload_hex;
    int byte = std::stoi(payload.substr(0, 2), nullptr, 16);
    bits += __builtin_popcount(byte);
    total_bits += 8;
  }
  EXPECT_NEAR(cs / double(N), 0.5, 3 * std::sqrt(0.25 / N));
  EXPECT_NEAR(bits / double(total_bits), 0.5, 3 * std::sqrt(0.25 / total_bits));
}

TEST(BqsOt, FullMeasurementAdversaryOutputsClassicalOnly) {
  Rng rng(12, 0);
  auto r = run_bqs_ot(params_for(16, 2), full_measurement_receiver(BasisRule::Random), rng);
  EXPECT_FALSE(r.receiver_output);
  EXPECT_EQ(r.adversary.qubits_at_bound, 0u);
  // bases, outcomes, b, r0, r1
  EXPECT_EQ(r.adversary.classical.size(), 16u * 3 + 2 * 2 * 16);
  EXPECT_EQ(r.transcript.find("Output", "k_out").size(), 1u);
}

TEST(BqsOt, MemoryViolationIsRecordedAndFatal) {
  Rng rng(13, 0);
  Transcript t;
  EXPECT_THROW(run_bqs_ot(params_for(8, 2), storing_receiver(2, 4), rng, t), MemoryBoundViolation);
  auto v = t.find("Memory");
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.back().event.find("violation"), std::string::npos);
}

TEST(BqsOt, RejectsNonReceivers) {
  Rng rng(14, 0);
  EXPECT_THROW(run_bqs_ot(params_for(8, 2), binding_attacker(), rng), std::invalid_argument);
}

TEST(OtFromRot, WorkedExample) {
  RotSample rot{{bs("011"), bs("000")}, {0, bs("011")}};
  auto r = ot_from_rot({bs("101"), bs("110")}, 1, rot);
  EXPECT_EQ(r.d, 1);
  EXPECT_EQ(r.m.x0, bs("101"));
  EXPECT_EQ(r.m.x1, bs("101"));
  EXPECT_EQ(r.y, bs("110"));
  EXPECT_EQ(r.transcript.find("Comm").size(), 2u);
}

TEST(OtFromRot, AlignedChoice) {
  RotSample rot{{bs("01"), bs("11")}, {1, bs("11")}};
  auto r = ot_from_rot({bs("00"), bs("10")}, 1, rot);
  EXPECT_EQ(r.d, 0);
  EXPECT_EQ(r.y, bs("10"));
}

TEST(OtFromRot, ExhaustiveCorrectness) {
  auto strings = all_strings(2);
  for (const auto &x0 : strings)
    for (const auto &x1 : strings)
      for (int c = 0; c < 2; ++c)
        for (const auto &p0 : strings)
          for (const auto &p1 : strings)
            for (int cp = 0; cp < 2; ++cp) {
              RotSample rot{{p0, p1}, {cp, cp ? p1 : p0}};
              EXPECT_EQ(ot_from_rot({x0, x1}, c, rot).y, c ? x1 : x0);
            }
}

TEST(OtFromRot, LengthMismatch) {
  Rng rng(15, 0);
  EXPECT_THROW(run_ot_from_rot({bs("01"), bs("1")}, 0, rng), std::invalid_argument);
}

TEST(OtFromRot, SenderCorruptionSimulationExact) {
  auto strings = all_strings(2);
  std::size_t cases = 0;
  for (const auto &p0 : strings)
    for (const auto &p1 : strings)
      for (const auto &k0 : strings)
        for (const auto &k1 : strings) {
          // Replies that ignore d, follow the protocol on (k0, k1), or swap on d.
          std::vector<std::function<OtStrings(int)>> replies = {
              [&](int) { return OtStrings{k0, k1}; },
              [&](int d) { return OtStrings{k0 ^ (d ? p1 : p0), k1 ^ (d ? p0 : p1)}; },
              [&](int d) { return d ? OtStrings{k1, k0} : OtStrings{k0, k1 ^ p0}; },
          };
          for (const auto &reply : replies) {
            RotSenderAdversary adv{{p0, p1}, reply};
            for (int c = 0; c < 2; ++c) {
              EXPECT_EQ(total_variation(ot_from_rot_real_corrupt_sender(adv, c),
                                        ot_from_rot_ideal_corrupt_sender(adv, c)),
                        0);
              ++cases;
            }
          }
        }
  EXPECT_EQ(cases, 256u * 3 * 2);
}

TEST(OtFromRot, ReceiverCorruptionSimulationExact) {
  auto strings = all_strings(2);
  for (int cp = 0; cp < 2; ++cp)
    for (const auto &yp : strings)
      for (int d = 0; d < 2; ++d)
        for (const auto &x0 : strings)
          for (const auto &x1 : strings) {
            RotReceiverAdversary adv{{cp, yp}, d};
            EXPECT_EQ(total_variation(ot_from_rot_real_corrupt_receiver(adv, {x0, x1}),
                                      ot_from_rot_ideal_corrupt_receiver(adv, {x0, x1})),
                      0);
          }
}

TEST(OtFromRot, TotalVariationDetectsDifference) {
  ExactOutcomes p{{"a", Rational(1)}};
  ExactOutcomes q{{"a", Rational(1, 4)}, {"b", Rational(3, 4)}};
  EXPECT_EQ(total_variation(p, q), Rational(3, 4));
}

TEST(BitCommitment, HonestOpenings) {
  Rng rng(16, 0);
  EXPECT_EQ(run_bc(1, 1, 3, rng).verifier_output, 1);
  EXPECT_EQ(run_bc(0, 1, 3, rng).verifier_output, 0);
  EXPECT_EQ(run_bc(1, 0, 3, rng).verifier_output, std::nullopt);
}

TEST(BitCommitment, OpenBeforeCommit) {
  Transcript t;
  BitCommitmentSession s(2, t);
  EXPECT_THROW(s.open(1), std::logic_error);
  Rng rng(17, 0);
  s.commit(1, ideal_tor(2, rng));
  EXPECT_THROW(s.commit(0, ideal_tor(2, rng)), std::logic_error);
  EXPECT_EQ(s.open(1), 1);
  EXPECT_THROW(s.open(1), std::logic_error);
}

TEST(BitCommitment, WrongStringRejected) {
  Transcript t;
  BitCommitmentSession s(2, t);
  TorSample tor{{bs("00"), bs("11")}, {1, bs("11")}};
  s.commit(0, tor);
  EXPECT_EQ(s.message(), 1);
  EXPECT_EQ(s.open_with(0, bs("10")), std::nullopt);
}

TEST(BitCommitment, HidingExact) {
  for (std::size_t ell = 1; ell <= 4; ++ell) {
    auto d0 = bc_commit_distribution(0, ell);
    auto d1 = bc_commit_distribution(1, ell);
    EXPECT_EQ(d0, d1);
    EXPECT_EQ(d0.at("m=0"), Rational(1, 2));
  }
}

TEST(SenderSimulation, HonestExtractionMatches) {
  Rng rng(18, 0);
  for (int i = 0; i < 50; ++i) {
    auto x = BitString::random(6, rng);
    auto b = BasisString::random(6, rng);
    auto r0 = sample_hash_seed(6, 2, rng);
    auto r1 = sample_hash_seed(6, 2, rng);
    auto sim = simulate_sender(fixed_bb84_sender(x, b, r0, r1), 2, rng);
    EXPECT_EQ(sim.extracted.x0, hash(r0, substring_in_basis(x, b, 0).padded(6)));
    EXPECT_EQ(sim.extracted.x1, hash(r1, substring_in_basis(x, b, 1).padded(6)));
    EXPECT_EQ(sim.receiver_output.y, sim.extracted.at(sim.receiver_output.c));
    EXPECT_EQ(sim.simulator_qubits, 6u);
    auto real = run_bqs_ot_corrupt_sender(fixed_bb84_sender(x, b, r0, r1), 2, rng);
    EXPECT_EQ(real.receiver_output.y, sim.extracted.at(real.receiver_output.c));
  }
}

TEST(SenderSimulation, ExactDistanceZero) {
  Rng rng(19, 0);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t ell = 1; ell <= std::min<std::size_t>(n, 2); ++ell) {
      EXPECT_NEAR(sender_simulation_distance(honest_sender(n, ell, rng), ell), 0, 1e-12);
      std::vector<Amplitudes> qubits;
      for (std::size_t i = 0; i < n; ++i) {
        Amplitudes a(2);
        a << Complex(rng.uniform() - 0.5, rng.uniform() - 0.5), Complex(rng.uniform() - 0.5, rng.uniform());
        qubits.push_back(a);
      }
      auto b = BasisString::random(n, rng);
      EXPECT_NEAR(sender_simulation_distance(
                      product_sender(qubits, b, sample_hash_seed(n, ell, rng), sample_hash_seed(n, ell, rng)), ell),
                  0, 1e-12);
      EXPECT_NEAR(sender_simulation_distance(epr_sender(n, ell, rng), ell), 0, 1e-12);
    }
  }
}

TEST(SenderSimulation, MalformedMessageRejected) {
  Rng rng(20, 0);
  auto s = honest_sender(4, 2, rng);
  s.r0 = sample_hash_seed(4, 1, rng);
  EXPECT_THROW(simulate_sender(s, 2, rng), std::invalid_argument);
  auto t = honest_sender(4, 2, rng);
  t.b = BasisString{0, 1};
  EXPECT_THROW(simulate_sender(t, 2, rng), std::invalid_argument);
}

TEST(ReceiverSimulator, FullMeasurementSixQubitsEnumerated) {
  auto params = params_for(6, 1);
  ReceiverSimulator sim(full_measurement_receiver(BasisRule::Random), params);
  EXPECT_EQ(sim.path(), SimulatorPath::Enumerated);
  EXPECT_GT(sim.table_rows(), 0u);
  Rng rng(21, 0);
  for (int i = 0; i < 200; ++i) {
    auto run = sim.run(rng);
    EXPECT_EQ(sim.choose(run.x, BasisString(run.b), run.trace), run.C);
    EXPECT_EQ(run.Y, run.simulated_strings.at(run.C));
    EXPECT_EQ(run.sender_output.at(run.C), run.Y);
  }
}

TEST(ReceiverSimulator, StructuredMatchesEnumerated) {
  std::vector<AdversaryStrategy> strategies = {
      full_measurement_receiver(BasisRule::Random), full_measurement_receiver(BasisRule::Fixed, 1),
      honest_receiver(), storing_receiver(2)};
  for (std::int64_t n = 2; n <= 5; ++n) {
    for (double eps : {0.0, 0.05, 0.2}) {
      auto params = params_for(n, 1);
      params.eps = eps == 0.0 ? 0.5 : eps;
      for (const auto &s : strategies) {
        ReceiverSimulatorOptions e, st;
        e.path = SimulatorPath::Enumerated;
        st.path = SimulatorPath::Structured;
        e.eps = st.eps = eps;
        ReceiverSimulator a(s, params, e), b(s, params, st);
        EXPECT_NEAR(a.alpha(), b.alpha(), 1e-9) << s.name << " n=" << n << " eps=" << eps;
        Rng rng(22, n);
        for (int i = 0; i < 100; ++i) {
          auto run = a.run(rng);
          EXPECT_EQ(b.choose(run.x, BasisString(run.b), run.trace), run.C) << s.name;
        }
      }
    }
  }
}

TEST(ReceiverSimulator, HonestReceiverGetsItsChoice) {
  auto params = params_for(12, 2);
  ReceiverSimulator sim(honest_receiver(), params);
  Rng rng(23, 0);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    auto run = sim.run(rng);
    int c = run.adversary.output->c;
    // With c = 0 every position with b_i = 1 is unknown; splitting picks
    // C = 1 only when there are at most alpha/2 of them.
    if (c == 1 || run.unknown_in_one > sim.alpha() / 2) {
      EXPECT_EQ(run.C, c);
      EXPECT_EQ(run.Y, run.adversary.output->y);
      ++checked;
    }
  }
  EXPECT_GT(checked, 480);
}

TEST(ReceiverSimulator, BudgetAndRestrictions) {
  ReceiverSimulatorOptions forced;
  forced.path = SimulatorPath::Enumerated;
  EXPECT_THROW(ReceiverSimulator(full_measurement_receiver(BasisRule::Random), params_for(8, 1), forced),
               EnumerationBudgetExceeded);
  EXPECT_NO_THROW(ReceiverSimulator(full_measurement_receiver(BasisRule::Random), params_for(64, 4)));
  EXPECT_THROW(ReceiverSimulator(epr_teleport_receiver(8, ModelVariant::Legacy), params_for(8, 2)),
               std::invalid_argument);
  EXPECT_THROW(ReceiverSimulator(storing_receiver(1, 3), params_for(8, 2)), MemoryBoundViolation);
}

TEST(ReceiverSimulator, StoredQubitsCountAsUnknown) {
  auto params = params_for(8, 1);
  ReceiverSimulatorOptions st;
  st.path = SimulatorPath::Structured;
  st.eps = 0.0;
  // With eps = 0, alpha is the fewest unknown positions: the stored ones.
  EXPECT_NEAR(ReceiverSimulator(storing_receiver(3), params, st).alpha(), 3.0, 1e-12);
  EXPECT_NEAR(ReceiverSimulator(full_measurement_receiver(BasisRule::Random), params, st).alpha(), 0.0, 1e-12);
}

TEST(Compose, HonestStackOutputsCommittedBit) {
  auto params = params_for(32, 3);
  for (int i = 0; i < 50; ++i) {
    Rng rng(24, i);
    int b = i % 2;
    auto r = compose_bc(params, b, 1, rng);
    EXPECT_TRUE(r.inner_correct);
    EXPECT_EQ(r.verifier_output, b);
    EXPECT_DOUBLE_EQ(r.error_budget, 6.0 / 8.0);
    EXPECT_FALSE(r.within_proven_bounds);
    EXPECT_EQ(r.simulator_classical_bits, 7u);
  }
  Rng rng(25, 0);
  EXPECT_EQ(compose_bc(params, 1, 0, rng).verifier_output, std::nullopt);
}

TEST(Compose, PhasesDelimited) {
  Rng rng(26, 0);
  auto r = compose_bc(params_for(16, 2), 1, 1, rng);
  std::vector<std::string> control;
  for (const auto &e : r.transcript.find("Control")) control.push_back(e.event);
  std::vector<std::string> expected = {"begin OTtoBC.commit", "begin BQS-TO", "end BQS-TO", "end OTtoBC.commit",
                                       "begin OTtoBC.open", "end OTtoBC.open"};
  EXPECT_EQ(control, expected);
  // BQS-TO runs with B as sender.
  EXPECT_EQ(r.transcript.find("Q-Comm")[0].dir, "B->A");
}

TEST(Compose, IdealInnerSameOutputDistribution) {
  auto params = params_for(16, 2);
  std::map<std::string, int> real, ideal;
  ComposeOptions io;
  io.inner = InnerImplementation::IdealTor;
  for (int i = 0; i < 400; ++i) {
    int b = i % 2, a = (i / 2) % 2;
    Rng r1(27, i), r2(28, i);
    auto x = compose_bc(params, b, a, r1).verifier_output;
    auto y = compose_bc(params, b, a, r2, io).verifier_output;
    real[std::to_string(b) + std::to_string(a) + (x ? std::to_string(*x) : "_")]++;
    ideal[std::to_string(b) + std::to_string(a) + (y ? std::to_string(*y) : "_")]++;
  }
  EXPECT_EQ(real, ideal);
}
