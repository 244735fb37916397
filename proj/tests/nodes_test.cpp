// Copyright 2026 The sampc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <chrono>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "sampc/bridge.hpp"
#include "sampc/bus.hpp"
#include "sampc/messages.hpp"
#include "sampc/nodes.hpp"
#include "sampc/registry.hpp"

namespace sampc {
namespace {

namespace beast = boost::beast;
namespace http = boost::beast::http;
namespace websocket = boost::beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using namespace std::chrono_literals;

// Polls `pred` until it holds or `timeout` passes.
template <class Pred>
bool eventually(Pred pred, std::chrono::milliseconds timeout = 5000ms) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(5ms);
  }
  return pred();
}

TEST(Topic, KeepsLatestOnly) {
  Topic<ErrorMsg> topic;
  EXPECT_EQ(topic.latest(), nullptr);
  EXPECT_EQ(topic.wait_newer(0, 1ms), nullptr);
  for (int i = 0; i < 5; ++i) topic.publish({0, std::to_string(i)});
  EXPECT_EQ(topic.seq(), 5u);
  EXPECT_EQ(topic.latest()->message, "4");
  EXPECT_EQ(topic.latest()->seq, 5u);
  EXPECT_EQ(topic.wait_newer(2, 1ms)->message, "4");
  EXPECT_EQ(topic.wait_newer(5, 1ms), nullptr);
}

TEST(Topic, WaitWakesOnPublish) {
  Topic<ErrorMsg> topic;
  std::jthread writer([&] {
    std::this_thread::sleep_for(20ms);
    topic.publish({0, "x"});
  });
  auto msg = topic.wait_newer(0, 5s);
  ASSERT_NE(msg, nullptr);
  EXPECT_EQ(msg->message, "x");
}

TEST(Broadcast, EverySubscriberGetsEveryMessageInOrder) {
  Broadcast<CommandMsg> b;
  auto first = b.subscribe();
  b.publish({0, "pause", ""});
  auto second = b.subscribe();
  b.publish({0, "resume", ""});
  b.publish({0, "reset", ""});
  const auto a = first->drain();
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].name, "pause");
  EXPECT_EQ(a[2].name, "reset");
  EXPECT_LT(a[0].seq, a[1].seq);
  const auto c = second->drain();
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].name, "resume");
  EXPECT_TRUE(first->drain().empty());
  second.reset();
  EXPECT_NO_THROW(b.publish({0, "pause", ""}));
}

TEST(Messages, JsonFieldNames) {
  const StateMsg s{3, 1.5, Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4), "cartpole"};
  const json js = to_json(s);
  EXPECT_EQ(js["type"], "state");
  EXPECT_EQ(js["seq"], 3);
  EXPECT_EQ(js["q"], json({1.0, 2.0}));
  EXPECT_EQ(js["task"], "cartpole");

  const ControlPlan plan = make_plan(Knots::Ones(3, 2), 0.5, 1.0,
                                     InterpolationKind::kCubic);
  PlanMsg pm = PlanMsg::from_plan(plan);
  pm.seq = 9;
  const json jp = to_json(pm);
  EXPECT_EQ(jp["kind"], "cubic");
  EXPECT_EQ(jp["knots"].size(), 3u);
  const PlanMsg back = plan_from_json(jp);
  EXPECT_EQ(back.knots, pm.knots);
  EXPECT_EQ(back.knot_times, pm.knot_times);
  EXPECT_EQ(back.kind, pm.kind);

  EXPECT_EQ(to_json(CommandMsg{0, "switch_task", "cartpole"})["task"], "cartpole");
  EXPECT_EQ(to_json(StatsMsg{1, 2.0, 0.5, 7, "a", "b"})["update_ms_mean"], 2.0);
  EXPECT_EQ(to_json(ErrorMsg{1, "boom"})["message"], "boom");
}

TEST(Messages, ClientFrames) {
  const NodeMessage p = client_message_from_json(
      json::parse(R"({"type":"param","scope":"optimizer","path":"sigma","value":0.2})"));
  EXPECT_EQ(std::get<ParamUpdateMsg>(p).value, 0.2);
  const NodeMessage c = client_message_from_json(
      json::parse(R"({"type":"command","name":"switch_optimizer","optimizer":"cem"})"));
  EXPECT_EQ(std::get<CommandMsg>(c).target, "cem");
  const NodeMessage v = client_message_from_json(
      json::parse(R"({"type":"command","name":"switch_task","value":"cartpole"})"));
  EXPECT_EQ(std::get<CommandMsg>(v).target, "cartpole");

  for (const char* bad : {
           R"([1,2])",
           R"({"scope":"task"})",
           R"({"type":"state"})",
           R"({"type":"param","scope":"gui","path":"x","value":1})",
           R"({"type":"param","scope":"task","path":"x"})",
           R"({"type":"param","scope":"task","path":3,"value":1})",
           R"({"type":"command","name":"explode"})",
           R"({"type":"command","name":"switch_task"})",
       }) {
    EXPECT_THROW(client_message_from_json(json::parse(bad)), InvalidArgument) << bad;
  }
}

TEST(SimulatorNode, ZeroControlWithoutPlan) {
  Bus bus;
  const Registry registry = Registry::with_builtins();
  SimulatorNode sim(bus, registry, "double_integrator", {0.01, false, 3});
  Rng rng(3);
  const TaskState x0 = registry.make_task("double_integrator")->reset(rng);
  sim.start();
  ASSERT_TRUE(eventually([&] { return bus.state.seq() > 50; }));
  sim.stop();
  const auto s = bus.state.latest();
  // Free flight: q(t) = q0 + v0 t, v constant.
  EXPECT_NEAR(s->q[0], x0.q[0] + x0.v[0] * s->t, 1e-9);
  EXPECT_NEAR(s->v[0], x0.v[0], 1e-12);
  EXPECT_EQ(s->task, "double_integrator");
}

TEST(SimulatorNode, FollowsPublishedPlan) {
  Bus bus;
  const Registry registry = Registry::with_builtins();
  bus.plan.publish(PlanMsg::from_plan(
      make_plan(Knots::Constant(2, 1, 0.5), 0.0, 1000.0, InterpolationKind::kZeroOrderHold)));
  SimulatorNode sim(bus, registry, "double_integrator", {0.01, false, 3});
  Rng rng(3);
  const TaskState x0 = registry.make_task("double_integrator")->reset(rng);
  sim.start();
  ASSERT_TRUE(eventually([&] { return bus.state.seq() > 50; }));
  sim.stop();
  const auto s = bus.state.latest();
  EXPECT_NEAR(s->v[0], x0.v[0] + 0.5 * s->t, 1e-9);
}

TEST(SimulatorNode, PauseKeepsWallClockTime) {
  Bus bus;
  const Registry registry = Registry::with_builtins();
  SimulatorNode sim(bus, registry, "double_integrator", {0.01, true, 0});
  sim.start();
  std::this_thread::sleep_for(200ms);
  bus.commands.publish({0, "pause", ""});
  ASSERT_TRUE(eventually([&] { return sim.paused(); }));
  std::this_thread::sleep_for(30ms);
  const auto frozen = bus.state.latest();
  const auto paused_at = std::chrono::steady_clock::now();
  std::this_thread::sleep_for(300ms);
  EXPECT_EQ(bus.state.latest()->seq, frozen->seq);
  EXPECT_EQ(bus.state.latest()->t, frozen->t);
  bus.commands.publish({0, "resume", ""});
  ASSERT_TRUE(eventually([&] { return bus.state.seq() > frozen->seq; }));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - paused_at).count();
  const double gap = bus.state.latest()->t - frozen->t;
  // The pause started up to ~30 ms before `paused_at`.
  EXPECT_NEAR(gap, wall, 0.1);
  EXPECT_GT(gap, 0.3);
  sim.stop();
}

TEST(SimulatorNode, ResetAndSwitchCommands) {
  Bus bus;
  const Registry registry = Registry::with_builtins();
  SimulatorNode sim(bus, registry, "double_integrator", {0.01, true, 0});
  sim.start();
  ASSERT_TRUE(eventually([&] { return bus.state.latest() && bus.state.latest()->t > 0.2; }));
  bus.commands.publish({0, "reset", ""});
  EXPECT_TRUE(eventually([&] { return bus.state.latest()->t < 0.1; }));
  bus.commands.publish({0, "switch_task", "cartpole"});
  EXPECT_TRUE(eventually([&] { return bus.state.latest()->task == "cartpole"; }));
  EXPECT_EQ(bus.state.latest()->q.size(), 2);
  sim.stop();
}

struct Stack {
  Bus bus;
  Registry registry = Registry::with_builtins();
  SimulatorNode sim{bus, registry, "cartpole", {0.01, true, 0}};
  ControllerNode controller{bus, registry, "cartpole", "ps", {1, 0, 100}};
};

TEST(ControllerNode, ZeroSigmaKeepsZeroPlan) {
  Stack s;
  s.bus.params.publish({0, "optimizer", "sigma", 0.0});
  s.sim.start();
  s.controller.start();
  ASSERT_TRUE(eventually([&] { return s.controller.iterations() > 5; }));
  for (int i = 0; i < 10; ++i) {
    const auto plan = s.bus.plan.wait_newer(s.bus.plan.seq(), 1s);
    ASSERT_NE(plan, nullptr);
    EXPECT_TRUE(plan->knots.isZero(0.0));
  }
  EXPECT_EQ(s.bus.errors.latest(), nullptr);
}

TEST(ControllerNode, SwitchOptimizerRelabelsStats) {
  Stack s;
  s.sim.start();
  s.controller.start();
  ASSERT_TRUE(eventually([&] { return s.bus.stats.latest() != nullptr; }));
  EXPECT_EQ(s.bus.stats.latest()->optimizer, "ps");
  s.bus.commands.publish({0, "switch_optimizer", "cem"});
  EXPECT_TRUE(eventually([&] { return s.bus.stats.latest()->optimizer == "cem"; }));
  const auto schema = s.bus.schema.latest();
  ASSERT_NE(schema, nullptr);
  EXPECT_EQ(schema->frames.size(), 4u);
  EXPECT_EQ(schema->frames[3].fields[1]["value"], "cem");
}

TEST(ControllerNode, BadInputsAreReported) {
  Stack s;
  s.sim.start();
  s.controller.start();
  s.bus.params.publish({0, "optimizer", "no_such_field", 1.0});
  ASSERT_TRUE(eventually([&] { return s.bus.errors.latest() != nullptr; }));
  EXPECT_NE(s.bus.errors.latest()->message.find("no_such_field"), std::string::npos);
  s.bus.commands.publish({0, "switch_task", "nope"});
  EXPECT_TRUE(eventually([&] {
    return s.bus.errors.latest()->message.find("nope") != std::string::npos;
  }));
  const long before = s.controller.iterations();
  EXPECT_TRUE(eventually([&] { return s.controller.iterations() > before + 3; }));
}

TEST(ControllerNode, KeepsRunningWhenSimulatorStops) {
  Stack s;
  s.sim.start();
  s.controller.start();
  ASSERT_TRUE(eventually([&] { return s.controller.iterations() > 3; }));
  s.sim.stop();
  const long before = s.controller.iterations();
  EXPECT_TRUE(eventually([&] { return s.controller.iterations() > before + 10; }));
  EXPECT_TRUE(s.controller.running());
}

// Minimal synchronous websocket client.
class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
    ws_.text(true);
  }
  ~Client() {
    beast::error_code ignored;
    ws_.next_layer().close(ignored);
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }

  json read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  // Reads until a frame satisfies `pred`, giving up after `max_frames`.
  template <class Pred>
  std::optional<json> read_until(Pred pred, int max_frames = 5000) {
    for (int i = 0; i < max_frames; ++i) {
      json j = read();
      if (pred(j)) return j;
    }
    return std::nullopt;
  }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

struct BridgedStack : Stack {
  WebsocketBridge bridge{bus, 0, "127.0.0.1"};
  BridgedStack() {
    bridge.start();
    sim.start();
    controller.start();
  }
  ~BridgedStack() {
    controller.stop();
    sim.stop();
    bridge.stop();
  }
};

TEST(Bridge, CommandPausesSimulator) {
  BridgedStack s;
  Client c(s.bridge.port());
  ASSERT_TRUE(c.read_until([](const json& j) { return j["type"] == "state"; }));
  c.send(R"({"type":"command","name":"pause"})");
  EXPECT_TRUE(eventually([&] { return s.sim.paused(); }));
  c.send(R"({"type":"command","name":"resume"})");
  EXPECT_TRUE(eventually([&] { return !s.sim.paused(); }));
}

TEST(Bridge, ParamFrameReachesController) {
  BridgedStack s;
  Client c(s.bridge.port());
  c.send(R"({"type":"param","scope":"optimizer","path":"sigma","value":0.2})");
  const auto frame = c.read_until([](const json& j) {
    if (j["type"] != "schema" || j["scope"] != "optimizer") return false;
    for (const json& f : j["fields"]) {
      if (f["name"] == "sigma") return f["value"] == 0.2;
    }
    return false;
  });
  ASSERT_TRUE(frame.has_value());
}

TEST(Bridge, LateClientGetsSchema) {
  BridgedStack s;
  ASSERT_TRUE(eventually([&] { return s.controller.iterations() > 3; }));
  std::this_thread::sleep_for(100ms);
  Client c(s.bridge.port());
  std::set<std::string> scopes;
  for (int i = 0; i < 20; ++i) {
    const json j = c.read();
    if (j["type"] == "schema") scopes.insert(j["scope"].get<std::string>());
  }
  EXPECT_EQ(scopes, (std::set<std::string>{"controller", "optimizer", "stack", "task"}));
}

TEST(Bridge, ClientsSeeTheSameTraces) {
  BridgedStack s;
  Client a(s.bridge.port());
  Client b(s.bridge.port());
  ASSERT_TRUE(eventually([&] { return s.bridge.clients() == 2; }));
  auto collect = [](Client& c) {
    std::vector<std::uint64_t> seqs;
    while (seqs.size() < 15) {
      const json j = c.read();
      if (j["type"] == "traces") seqs.push_back(j["seq"].get<std::uint64_t>());
    }
    return seqs;
  };
  const auto sa = collect(a);
  const auto sb = collect(b);
  const std::uint64_t lo = std::max(sa.front(), sb.front());
  const std::uint64_t hi = std::min(sa.back(), sb.back());
  ASSERT_LT(lo, hi);
  std::vector<std::uint64_t> ra, rb;
  for (auto q : sa) if (q >= lo && q <= hi) ra.push_back(q);
  for (auto q : sb) if (q >= lo && q <= hi) rb.push_back(q);
  EXPECT_EQ(ra, rb);
  EXPECT_TRUE(std::is_sorted(sa.begin(), sa.end()));
}

TEST(Bridge, MalformedFrameGetsErrorAndSessionSurvives) {
  BridgedStack s;
  Client c(s.bridge.port());
  c.send("not json");
  ASSERT_TRUE(c.read_until([](const json& j) { return j["type"] == "error"; }));
  c.send(R"({"type":"command","name":"explode"})");
  const auto err = c.read_until([](const json& j) {
    return j["type"] == "error" &&
           j["message"].get<std::string>().find("explode") != std::string::npos;
  });
  ASSERT_TRUE(err.has_value());
  c.send(R"({"type":"command","name":"pause"})");
  EXPECT_TRUE(eventually([&] { return s.sim.paused(); }));
  EXPECT_EQ(s.bridge.clients(), 1u);
}

TEST(Bridge, PortInUse) {
  Bus bus;
  WebsocketBridge first(bus, 0, "127.0.0.1");
  EXPECT_THROW(WebsocketBridge(bus, first.port(), "127.0.0.1"), Error);
}

TEST(Bridge, PlainHttpGet) {
  Bus bus;
  WebsocketBridge bridge(bus, 0, "127.0.0.1");
  bridge.start();
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  tcp::resolver resolver(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(bridge.port())));
  http::request<http::empty_body> req(http::verb::get, "/", 11);
  req.set(http::field::host, "localhost");
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_NE(res.body().find("websocket"), std::string::npos);
  bridge.stop();
  bridge.stop();
}

}  // namespace
}  // namespace sampc
