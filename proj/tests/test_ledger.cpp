#include <gtest/gtest.h>

#include <sstream>

#include "detrm/ledger/chain_file.hpp"
#include "detrm/ledger/offchain_store.hpp"
#include "support/network.hpp"
#include "support/random_chain.hpp"

using namespace detrm;
using namespace detrm::ledger;
using testnet::Network;

namespace {

Transaction sample_create(std::string id = "lot-1", std::uint64_t ts = 3) {
  return {std::move(id), ts, CreatePayload{"farm", "milk", "farm/cold", 2.5, {{"grade", "A"}}}, {}};
}

Transaction sample_trade() {
  TradePayload t;
  t.asset_batch_id = "lot-1";
  t.seller = "farm";
  t.buyer = "depot";
  t.new_batch_id = "lot-1b";
  t.quantity = 1.0;
  t.destination_location = "depot/cold";
  t.terms = {{"ship", "deliver", 0.8, 4, 3}, {"pay", "", 0.5, 4, std::nullopt}};
  t.attachment_hash = crypto::sha256("invoice");
  return {"trade/lot-1b", 4, t, {}};
}

std::vector<Transaction> all_kinds() {
  GenesisPayload g;
  g.params.gamma = 0.8;
  g.authorities.push_back({"agency", {{"country", "NZ"}}, crypto::KeyPair::derive("a").public_key()});
  MonitorPayload m{"gw", "farm/cold", {{"s1", 4.25, 0.9, 3, "farm/cold"}, {"s2", -1.5, 1.0, 3, "farm/cold"}}};
  ProducePayload p{"farm", {"lot-1", "lot-2"}, {{"y-1", "yogurt", "farm/line", 2.0, {}}}, {{"temp", "43"}}};
  InspectPayload in{"agency", "farm", std::string("lot-1"), 0.75, crypto::sha256("r")};
  JoinPayload j{"farm", {Role::producer, Role::retailer}, false, {{"k", "v"}}, {"farm/cold"}, {}};
  DeployPayload d{"milk", 2.0, 8.0, 2, 0.9, "agency", "farm"};
  return {{"genesis", 0, g, {}},   {"join/farm", 0, j, {}}, {"contract/milk", 0, d, {}},
          sample_create(),         {"mon", 3, m, {}},       {"y-1", 5, p, {}},
          {"insp", 6, in, {}},     sample_trade(),          {"q", 7, QueryPayload{QueryKind::provenance, "y-1"}, {}}};
}

}  // namespace

TEST(Crypto, Sha256KnownAnswer) {
  EXPECT_EQ(crypto::to_hex(crypto::sha256("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(crypto::to_hex(crypto::sha256("")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Crypto, SignVerify) {
  const auto a = crypto::KeyPair::generate();
  const auto b = crypto::KeyPair::generate();
  const std::string msg = "hello";
  const std::span<const crypto::Byte> bytes(reinterpret_cast<const crypto::Byte*>(msg.data()), msg.size());
  const auto sig = a.sign(bytes);
  EXPECT_TRUE(crypto::verify(a.public_key(), bytes, sig));
  EXPECT_FALSE(crypto::verify(b.public_key(), bytes, sig));
  auto bad = sig;
  bad[5] ^= 0x01;
  EXPECT_FALSE(crypto::verify(a.public_key(), bytes, bad));
}

TEST(Crypto, DerivedKeysAreStable) {
  EXPECT_EQ(crypto::KeyPair::derive("x").public_key(), crypto::KeyPair::derive("x").public_key());
  EXPECT_NE(crypto::KeyPair::derive("x").public_key(), crypto::KeyPair::derive("y").public_key());
}

TEST(Crypto, HexRoundTripAndErrors) {
  const crypto::Digest d = crypto::sha256("z");
  EXPECT_EQ(crypto::array_from_hex<32>(crypto::to_hex(d)), d);
  EXPECT_THROW(crypto::from_hex("abc"), Error);
  EXPECT_THROW(crypto::from_hex("zz"), Error);
  EXPECT_THROW(crypto::array_from_hex<32>("00"), Error);
}

TEST(Canonical, DeterministicAndInjective) {
  const auto a = sample_create();
  EXPECT_EQ(canonical_bytes(a), canonical_bytes(sample_create()));
  EXPECT_NE(canonical_bytes(a), canonical_bytes(sample_create("lot-1", 4)));
  EXPECT_NE(canonical_bytes(a), canonical_bytes(sample_create("lot-2")));
}

TEST(Canonical, SignaturesExcluded) {
  const auto tx = sample_create();
  const auto signed_tx = sign_tx(tx, "farm", crypto::KeyPair::derive("farm"));
  ASSERT_EQ(signed_tx.signatures.size(), 1u);
  EXPECT_EQ(canonical_bytes(tx), canonical_bytes(signed_tx));
}

TEST(Canonical, RoundTripsEveryKind) {
  for (const auto& tx : all_kinds()) {
    const auto bytes = canonical_bytes(tx);
    const auto back = decode_canonical(bytes);
    EXPECT_EQ(back.kind(), tx.kind());
    EXPECT_EQ(back.tx_id, tx.tx_id);
    EXPECT_EQ(canonical_bytes(back), bytes) << to_string(tx.kind());
  }
}

TEST(Canonical, DecodeRejectsTruncationAndTrailingBytes) {
  auto bytes = canonical_bytes(sample_trade());
  auto shorter = bytes;
  shorter.pop_back();
  EXPECT_THROW(decode_canonical(shorter), Error);
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_THROW(decode_canonical(longer), Error);
  auto bad_kind = bytes;
  bad_kind[1] = 200;
  EXPECT_THROW(decode_canonical(bad_kind), Error);
}

TEST(Signing, TamperInvalidates) {
  const auto key = crypto::KeyPair::derive("farm");
  auto tx = sign_tx(sample_create(), "farm", key);
  EXPECT_TRUE(verify_signature(tx, tx.signatures[0], key.public_key()));
  EXPECT_FALSE(verify_signature(tx, tx.signatures[0], crypto::KeyPair::derive("other").public_key()));
  std::get<CreatePayload>(tx.payload).quantity = 2.5000000000000004;
  EXPECT_FALSE(verify_signature(tx, tx.signatures[0], key.public_key()));
}

TEST(Submit, AcceptedCreateAppearsInState) {
  Network net;
  testnet::populate(net);
  const auto r = net.create("farm", "lot-1", "milk", "farm/cold");
  ASSERT_TRUE(r.accepted()) << r.message;
  EXPECT_EQ(r.tx_id, "lot-1");
  ASSERT_NE(net.state().asset("lot-1"), nullptr);
}

TEST(Submit, UnknownSigner) {
  Network net;
  testnet::populate(net);
  const auto before = net.ledger.state_root();
  const auto tx = sign_tx(sample_create(), "stranger", crypto::KeyPair::derive("stranger"));
  const auto r = net.ledger.submit(tx);
  EXPECT_FALSE(r.accepted());
  EXPECT_EQ(r.error, Errc::UnknownSigner);
  EXPECT_EQ(net.ledger.state_root(), before);
}

TEST(Submit, InvalidSignature) {
  Network net;
  testnet::populate(net);
  const auto tx = sign_tx(sample_create(), "farm", crypto::KeyPair::derive("impostor"));
  EXPECT_EQ(net.ledger.submit(tx).error, Errc::InvalidSignature);
}

TEST(Submit, MissingSignatureAndSignedQuery) {
  Network net;
  testnet::populate(net);
  EXPECT_EQ(net.ledger.submit(sample_create()).error, Errc::MissingSignature);
  Transaction q{"q", 1, QueryPayload{QueryKind::reputation, "farm"}, {}};
  EXPECT_EQ(net.ledger.submit(net.keys.sign(q, {"farm"})).error, Errc::MalformedTransaction);
  EXPECT_TRUE(net.ledger.submit(q).accepted());
}

TEST(Submit, DuplicateSignerRejected) {
  Network net;
  testnet::populate(net);
  auto tx = net.keys.sign(sample_create(), {"farm"});
  tx.signatures.push_back(tx.signatures.front());
  EXPECT_EQ(net.ledger.submit(tx).error, Errc::MalformedTransaction);
}

TEST(Submit, TradeWithOneSignatureIsHandlerRejection) {
  Network net;
  testnet::populate(net);
  Network::expect_ok(net.create("farm", "lot-1", "milk", "farm/cold"));
  const auto r = net.ledger.submit(net.keys.sign(sample_trade(), {"farm"}));
  EXPECT_EQ(r.error, Errc::HandlerRejection);
  EXPECT_EQ(r.cause, Errc::MissingCounterSignature);
}

TEST(Seal, EmptyBlockLinks) {
  Network net;
  const auto g = net.ledger.seal_block();
  const auto e = net.ledger.seal_block();
  EXPECT_EQ(g.height, 0u);
  EXPECT_EQ(g.prev_hash, crypto::kZeroDigest);
  EXPECT_EQ(e.height, 1u);
  EXPECT_TRUE(e.transactions.empty());
  EXPECT_EQ(e.prev_hash, g.block_hash);
  EXPECT_EQ(e.state_root, g.state_root);
  EXPECT_TRUE(net.ledger.validate_chain());
}

TEST(Seal, FifoOrder) {
  Network net;
  testnet::populate(net);
  net.ledger.seal_block();
  Network::expect_ok(net.create("farm", "A", "milk", "farm/cold"));
  Network::expect_ok(net.create("farm", "B", "milk", "farm/cold"));
  const auto b = net.ledger.seal_block();
  ASSERT_EQ(b.transactions.size(), 2u);
  EXPECT_EQ(b.transactions[0].tx_id, "A");
  EXPECT_EQ(b.transactions[1].tx_id, "B");
  EXPECT_EQ(net.ledger.pending_count(), 0u);
}

TEST(Seal, RejectedTxNotInBlock) {
  Network net;
  testnet::populate(net);
  net.ledger.seal_block();
  Network::expect_ok(net.create("farm", "A", "milk", "farm/cold"));
  EXPECT_FALSE(net.create("farm", "A", "milk", "farm/cold").accepted());
  EXPECT_EQ(net.ledger.seal_block().transactions.size(), 1u);
}

TEST(Replay, IdenticalBlockHashes) {
  auto run = [] {
    Network net;
    testnet::populate(net);
    testnet::random_workload(net, 300, 17);
    std::vector<crypto::Digest> hashes;
    for (const auto& b : net.ledger.blocks()) hashes.push_back(b.block_hash);
    return hashes;
  };
  const auto a = run();
  EXPECT_GT(a.size(), 3u);
  EXPECT_EQ(a, run());
}

TEST(Replay, FromBlocksRebuildsState) {
  Network net;
  testnet::populate(net);
  testnet::random_workload(net, 200, 3);
  auto copy = Ledger::from_blocks(net.ledger.blocks(), contracts::supply_chain_factory());
  EXPECT_EQ(copy->state_root(), net.ledger.state_root());
  EXPECT_EQ(copy->height(), net.ledger.height());
}

TEST(Validate, UntamperedMutatedAndReordered) {
  Network net;
  testnet::populate(net);
  testnet::random_workload(net, 200, 8);
  auto blocks = net.ledger.blocks();
  ASSERT_GE(blocks.size(), 5u);
  EXPECT_TRUE(validate_chain(blocks, contracts::supply_chain_factory()));

  // Find a block with a transaction to tamper.
  std::size_t h = 3;
  while (h < blocks.size() && blocks[h].transactions.empty()) ++h;
  ASSERT_LT(h, blocks.size());
  auto mutated = blocks;
  mutated[h].transactions[0].timestamp ^= 1;
  EXPECT_FALSE(validate_chain(mutated, contracts::supply_chain_factory()));

  auto resigned = blocks;
  resigned[h].transactions[0].signatures[0].bytes[0] ^= 0x80;
  EXPECT_FALSE(validate_chain(resigned, contracts::supply_chain_factory()));

  auto reordered = blocks;
  std::swap(reordered[2], reordered[3]);
  EXPECT_FALSE(validate_chain(reordered, contracts::supply_chain_factory()));

  auto rooted = blocks;
  rooted[1].state_root[0] ^= 1;
  EXPECT_FALSE(validate_chain(rooted, contracts::supply_chain_factory()));

  EXPECT_FALSE(validate_chain({}, contracts::supply_chain_factory()));
  EXPECT_THROW(Ledger::from_blocks(mutated, contracts::supply_chain_factory()), Error);
}

TEST(Validate, QueriesDoNotAffectStateRoot) {
  Network net;
  testnet::populate(net);
  const auto w = testnet::random_workload(net, 400, 21);
  ASSERT_GT(w.queries, 10u);

  Ledger filtered(contracts::supply_chain_factory());
  for (const auto& b : net.ledger.blocks()) {
    for (const auto& tx : b.transactions) {
      if (tx.kind() != TxKind::query) {
        ASSERT_TRUE(filtered.submit(tx).accepted());
      }
    }
    EXPECT_EQ(filtered.seal_block().state_root, b.state_root);
  }
}

TEST(ChainFile, RoundTrip) {
  Network net;
  testnet::populate(net);
  testnet::random_workload(net, 100, 4);
  const auto blocks = net.ledger.blocks();
  std::stringstream buf;
  write_chain(buf, blocks);
  const auto back = read_chain(buf);
  ASSERT_EQ(back.size(), blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    EXPECT_EQ(back[i].block_hash, blocks[i].block_hash);
    EXPECT_EQ(compute_block_hash(back[i]), blocks[i].block_hash);
  }
  EXPECT_TRUE(validate_chain(back, contracts::supply_chain_factory()));

  const auto path = std::filesystem::temp_directory_path() / "detrm_chain_roundtrip.log";
  save_chain(path, blocks);
  EXPECT_EQ(load_chain(path).size(), blocks.size());
  std::filesystem::remove(path);
}

TEST(ChainFile, FormatErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_chain(in);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ConfigError;
  };
  const std::string zero(64, '0');
  EXPECT_EQ(parse(""), Errc::ChainFormat);
  EXPECT_EQ(parse("not-a-chain\n"), Errc::ChainFormat);
  EXPECT_EQ(parse("detrm-chain 1\nblock 0 " + zero + " " + zero + " " + zero + " 1\n"), Errc::ChainFormat);
  EXPECT_EQ(parse("detrm-chain 1\ntx 00 0\n"), Errc::ChainFormat);
  EXPECT_EQ(parse("detrm-chain 1\nblock 0 " + zero + " " + zero + " " + zero + " 1\ntx zz 0\n"),
            Errc::ChainFormat);
  EXPECT_EQ(parse("detrm-chain 1\nwhat\n"), Errc::ChainFormat);
  EXPECT_EQ(parse("detrm-chain 1\nblock 0 " + zero + " 12 " + zero + " 0\n"), Errc::ChainFormat);
  EXPECT_THROW(load_chain("/nonexistent/dir/chain.log"), Error);
  EXPECT_THROW(save_chain("/nonexistent/dir/chain.log", {}), Error);
}

TEST(OffChain, ContentAddressed) {
  OffChainStore store;
  const auto d = store.put("report body");
  EXPECT_EQ(d, crypto::sha256("report body"));
  EXPECT_EQ(store.get(d), "report body");
  EXPECT_EQ(store.put("report body"), d);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_FALSE(store.contains(crypto::sha256("missing")));
}

TEST(OffChain, DirectoryBacked) {
  const auto dir = std::filesystem::temp_directory_path() / "detrm_offchain_test";
  std::filesystem::remove_all(dir);
  crypto::Digest d;
  {
    OffChainStore store(dir);
    d = store.put("attachment");
  }
  OffChainStore reopened(dir);
  EXPECT_EQ(reopened.get(d), "attachment");
  std::filesystem::remove_all(dir);
}

TEST(Events, SinkSeesAcceptedEventsOnly) {
  Network net;
  testnet::populate(net);
  std::vector<Event> seen;
  net.ledger.subscribe([&](const Event& e) { seen.push_back(e); });
  Network::expect_ok(net.create("farm", "lot-1", "milk", "farm/cold"));
  const auto before = seen.size();
  EXPECT_FALSE(net.monitor("farm", "farm/cold", testnet::readings("farm/cold", 1, {4, 4}), 1).accepted());
  EXPECT_EQ(seen.size(), before);
  Network::expect_ok(net.monitor("farm", "farm/cold", testnet::readings("farm/cold", 1, {4, 4, 4}), 1));
  EXPECT_GT(seen.size(), before);
}
