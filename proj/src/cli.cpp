#include "mpstego/cli.hpp"

#include "mpstego/endpoint.hpp"
#include "mpstego/errors.hpp"
#include "mpstego/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace mpstego {

CapacityReport plan_capacity(const SessionConfig& cfg) {
    check_combination(cfg.codec, cfg.alg);
    cfg.validate();
    CapacityReport r;
    r.gross_bits = cfg.min_capacity();
    r.header_bits = cfg.header_design == HeaderDesign::Static ? static_hdr::kDataBits
                                                              : kChunkTypeBits;
    r.net_bits = r.gross_bits > r.header_bits ? r.gross_bits - r.header_bits : 0;
    r.packets_per_second = static_cast<double>(nominal_rate_hz(cfg.codec)) / cfg.frame_codes;
    r.net_bits_per_second = static_cast<double>(r.net_bits) * r.packets_per_second;
    return r;
}

std::string to_text(const SessionConfig& cfg, const CapacityReport& r) {
    char pps[32], bps[32];
    std::snprintf(pps, sizeof pps, "%.2f", r.packets_per_second);
    std::snprintf(bps, sizeof bps, "%.0f", r.net_bits_per_second);
    std::ostringstream os;
    os << "codec=" << to_string(cfg.codec) << " alg=" << to_string(cfg.alg)
       << " header=" << to_string(cfg.header_design) << " frame=" << cfg.frame_codes
       << " embedding=" << to_string(cfg.placement.mode) << "\n"
       << "gross_bits_per_packet=" << r.gross_bits << "\n"
       << "header_bits_per_packet=" << r.header_bits << "\n"
       << "net_bits_per_packet=" << r.net_bits << "\n"
       << "payload_bytes_per_segment=" << cfg.segment_size() << "\n"
       << "packets_per_second=" << pps << "\n"
       << "net_bits_per_second=" << bps << "\n";
    return os.str();
}

std::string run_sweep(const PcmClip& clip, const SweepOptions& o) {
    const std::vector<CodecId> codecs =
        o.codec ? std::vector<CodecId>{*o.codec} : std::vector<CodecId>{CodecId::Ulaw, CodecId::Dvi};
    const std::vector<EmbedAlgorithm> algs =
        o.alg ? std::vector<EmbedAlgorithm>{*o.alg}
              : std::vector<EmbedAlgorithm>{EmbedAlgorithm::Lsb1, EmbedAlgorithm::Lsb2,
                                            EmbedAlgorithm::Lsb6, EmbedAlgorithm::Msb};
    const std::vector<HeaderDesign> designs =
        o.header ? std::vector<HeaderDesign>{*o.header}
                 : std::vector<HeaderDesign>{HeaderDesign::Static, HeaderDesign::Dynamic};

    std::ostringstream os;
    os << csv_header() << "\n";
    for (CodecId codec : codecs) {
        const EncodedStream cover = encode_for(codec, clip);
        for (EmbedAlgorithm alg : algs) {
            for (HeaderDesign design : designs) {
                for (int scenario : o.scenarios) {
                    const std::string tag = to_string(codec) + "/" + to_string(alg) + "/" +
                                            to_string(design) + "/scenario " +
                                            std::to_string(scenario);
                    if (!is_valid_combination(codec, alg)) {
                        os << "# skipped " << tag << ": " << to_string(alg)
                           << " needs 8-bit codes\n";
                        continue;
                    }
                    SessionConfig cfg = o.base;
                    cfg.codec = codec;
                    cfg.alg = alg;
                    cfg.header_design = design;
                    ScenarioOptions so;
                    so.payload_seed = cfg.seed;
                    so.keep_records = o.transcript != nullptr;
                    so.forward = {o.loss, 0.0, cfg.seed * 2 + 1};
                    so.backward = {o.loss, 0.0, cfg.seed * 2 + 2};
                    try {
                        const TranscriptReport t = run_scenario(scenario, cfg, cover, so);
                        MetricsReport m = build_report(cfg, t.cover, t.stego,
                                                       t.hidden_bits_total, scenario, o.domain);
                        if (o.pesq_tool) attach_mos(m, *o.pesq_tool, t.cover, t.stego);
                        os << to_csv_row(m) << "\n";
                        if (o.transcript) *o.transcript << "## " << tag << "\n" << t.to_text();
                    } catch (const CapacityError& e) {
                        os << "# skipped " << tag << ": " << e.what() << "\n";
                    } catch (const SegmentationError& e) {
                        os << "# skipped " << tag << ": " << e.what() << "\n";
                    }
                }
            }
        }
    }
    return os.str();
}

namespace {

struct Flags {
    std::string codec = "ulaw";
    std::string alg = "lsb1";
    std::string header = "static";
    std::string embedding = "fixed";
    unsigned offset = 0;
    unsigned frame = 160;
    double loss = 0.0;
    std::uint64_t seed = 1;
    unsigned ack_every = 1;
    unsigned resend_limit = 32;
    std::size_t segment = 0;
    std::string input;
    std::string report;
    std::string pesq_tool;
    std::string domain = "code";
};

SessionConfig make_config(const Flags& f) {
    SessionConfig c;
    c.codec = parse_codec(f.codec);
    c.alg = parse_algorithm(f.alg);
    c.header_design = parse_header_design(f.header);
    c.placement.mode = parse_placement(f.embedding);
    c.placement.initial_offset_codes = f.offset;
    c.frame_codes = f.frame;
    c.seed = f.seed;
    c.ack_every_n = f.ack_every;
    c.resend_limit = f.resend_limit;
    c.segment_bytes = f.segment;
    check_combination(c.codec, c.alg);
    if (f.loss < 0.0 || f.loss >= 1.0) throw ArgumentError("--loss must be in [0, 1)");
    c.validate();
    return c;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << text;
}

std::string require(const std::string& value, const char* flag) {
    if (value.empty()) throw ConfigError(std::string(flag) + " is required");
    return value;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hidden micro-protocol channel inside voice-over-RTP streams"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file; flags given on the command line win");
    app.fallthrough();

    Flags f;
    app.add_option("--codec", f.codec, "ulaw | dvi")->capture_default_str();
    app.add_option("--alg", f.alg, "lsb1 | lsb2 | msb | lsb6")->capture_default_str();
    app.add_option("--header", f.header, "static | dynamic")->capture_default_str();
    app.add_option("--embedding", f.embedding, "fixed | chained")->capture_default_str();
    app.add_option("--offset", f.offset, "Initial header offset in codes")->capture_default_str();
    app.add_option("--frame", f.frame, "Codes per RTP packet")->capture_default_str();
    app.add_option("--loss", f.loss, "Datagram loss probability")->capture_default_str();
    app.add_option("--seed", f.seed, "Seed for schedules, payloads and loss")->capture_default_str();
    app.add_option("--ack-every", f.ack_every, "DAT packets per acknowledgment")
        ->capture_default_str();
    app.add_option("--resend-limit", f.resend_limit, "Retransmission rounds without progress")
        ->capture_default_str();
    app.add_option("--segment", f.segment, "Max payload bytes per DAT (0: capacity)")
        ->capture_default_str();
    app.add_option("--input", f.input, "Cover WAV");
    app.add_option("--report", f.report, "Write the report here instead of stdout");
    app.add_option("--pesq-tool", f.pesq_tool, "External MOS-LQO scorer: TOOL ref.wav deg.wav");
    app.add_option("--domain", f.domain, "Metric domain: code | pcm")->capture_default_str();

    auto* send = app.add_subcommand("send", "Hide a payload file in a cover streamed to a peer");
    std::string payload_path, peer, bind_host = "0.0.0.0";
    unsigned listen_port = 0;
    unsigned pace_ms = 0, reply_ms = 100;
    send->add_option("--payload", payload_path, "File to hide")->required();
    send->add_option("--peer", peer, "Receiver HOST:PORT")->required();
    send->add_option("--listen", listen_port, "Local UDP port (0: any)");
    send->add_option("--bind", bind_host, "Local address")->capture_default_str();
    send->add_option("--pace", pace_ms, "Milliseconds between packets")->capture_default_str();
    send->add_option("--reply-timeout", reply_ms, "Milliseconds to wait for each answer")
        ->capture_default_str();

    auto* recv = app.add_subcommand("recv", "Receive a hidden payload");
    std::string output_path, wav_path;
    unsigned idle_ms = 3000;
    recv->add_option("--listen", listen_port, "Local UDP port")->required();
    recv->add_option("--bind", bind_host, "Local address")->capture_default_str();
    recv->add_option("--output", output_path, "Where to write the payload")->required();
    recv->add_option("--wav", wav_path, "Where to write the reassembled cover audio");
    recv->add_option("--idle-timeout", idle_ms, "Milliseconds of silence that end the session")
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Run scenarios in-process, emit CSV");
    std::string scenario = "all", transcript_path;
    simulate->add_option("--scenario", scenario, "1 | 2 | 3 | all")->capture_default_str();
    simulate->add_option("--transcript", transcript_path, "Write per-packet transcripts here");

    auto* capacity = app.add_subcommand("capacity", "Hidden capacity of a configuration");

    auto* analyze = app.add_subcommand("analyze", "Metrics row for a cover/stego WAV pair");
    std::string stego_path;
    std::size_t hidden_bits = 0;
    analyze->add_option("--stego", stego_path, "Stego WAV")->required();
    analyze->add_option("--hidden-bits", hidden_bits, "Hidden bits carried, for the % column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        bool sweeping = simulate->parsed();
        SessionConfig cfg;
        if (!sweeping) cfg = make_config(f);

        if (capacity->parsed()) {
            emit(to_text(cfg, plan_capacity(cfg)), f.report, out);
            return kExitOk;
        }

        if (simulate->parsed()) {
            SweepOptions so;
            // Only flags the operator set restrict the sweep.
            if (app.count("--codec")) so.codec = parse_codec(f.codec);
            if (app.count("--alg")) so.alg = parse_algorithm(f.alg);
            if (app.count("--header")) so.header = parse_header_design(f.header);
            if (so.codec && so.alg) check_combination(*so.codec, *so.alg);
            if (scenario != "all") {
                if (scenario != "1" && scenario != "2" && scenario != "3") {
                    throw ConfigError("--scenario must be 1, 2, 3 or all");
                }
                so.scenarios = {std::stoi(scenario)};
            }
            Flags base = f;
            base.codec = "ulaw";
            base.alg = "lsb1";
            so.base = make_config(base);
            so.base.header_design = parse_header_design(f.header);
            so.loss = f.loss;
            so.domain = parse_metric_domain(f.domain);
            if (!f.pesq_tool.empty()) so.pesq_tool = f.pesq_tool;
            std::ofstream transcript;
            if (!transcript_path.empty()) {
                transcript.open(transcript_path);
                if (!transcript) throw IoError("cannot write " + transcript_path);
                so.transcript = &transcript;
            }
            const PcmClip clip = read_wav(require(f.input, "--input"));
            emit(run_sweep(clip, so), f.report, out);
            return kExitOk;
        }

        if (analyze->parsed()) {
            const PcmClip a = read_wav(require(f.input, "--input"));
            const PcmClip b = read_wav(stego_path);
            const MetricDomain domain = parse_metric_domain(f.domain);
            EncodedStream ca = encode_for(cfg.codec, a);
            EncodedStream cb = encode_for(cfg.codec, b);
            if (ca.codes.size() != cb.codes.size()) {
                throw ArgumentError("cover and stego lengths differ");
            }
            MetricsReport m = build_report(cfg, ca, cb, hidden_bits, 0, MetricDomain::Code);
            if (domain == MetricDomain::Pcm) {
                m.domain = domain;
                m.mse = mse(a, b);
                m.snr_db = snr_db(a, b);
                m.psnr_db = psnr_db(a, b);
            }
            if (!f.pesq_tool.empty()) m.mos_lqo = run_pesq_tool(f.pesq_tool, f.input, stego_path);
            emit(csv_header() + "\n" + to_csv_row(m) + "\n", f.report, out);
            return kExitOk;
        }

        if (send->parsed()) {
            const EncodedStream cover = encode_for(cfg.codec, read_wav(require(f.input, "--input")));
            const auto payload = read_file(payload_path);
            const auto [host, port] = parse_host_port(peer);
            UdpChannel ch(bind_host, static_cast<std::uint16_t>(listen_port), host, port,
                          LossModel{f.loss, 0.0, cfg.seed * 2 + 1});
            LiveOptions lo;
            lo.pace = std::chrono::milliseconds(pace_ms);
            lo.reply_timeout = std::chrono::milliseconds(reply_ms);
            const LiveSenderResult r = run_live_sender(ch, cfg, cover, payload, lo);
            std::ostringstream os;
            os << "packets=" << r.packets << " replies=" << r.replies
               << " resends_received=" << r.stats.resends_received
               << " retransmitted_dat=" << r.stats.retransmitted_dat
               << " probes=" << r.stats.probes_sent
               << " requests=" << r.stats.requests_completed
               << " hidden_bits=" << r.stats.hidden_bits_emitted
               << " success=" << (r.success ? 1 : 0) << "\n";
            for (const auto& e : r.errors) os << "error: " << e << "\n";
            emit(os.str(), f.report, out);
            return r.success ? kExitOk : kExitTransport;
        }

        if (recv->parsed()) {
            EncodedStream cover;
            if (!f.input.empty()) {
                cover = encode_for(cfg.codec, read_wav(f.input));
            } else {
                cover.codec = cfg.codec;
                cover.codes.assign(cfg.frame_codes, silence_code(cfg.codec));
            }
            UdpChannel ch(bind_host, static_cast<std::uint16_t>(listen_port), "", 0,
                          LossModel{f.loss, 0.0, cfg.seed * 2 + 2});
            LiveOptions lo;
            lo.idle_timeout = std::chrono::milliseconds(idle_ms);
            const LiveReceiverResult r = run_live_receiver(ch, cfg, cover, lo);
            write_file(output_path, r.payload);
            if (!wav_path.empty()) write_wav(decode_any(r.stream), wav_path);
            std::ostringstream os;
            os << "packets=" << r.packets << " messages=" << r.messages
               << " bytes=" << r.payload.size() << " resends_sent=" << r.stats.resends_sent
               << " oks_sent=" << r.stats.oks_sent << " gaps=" << r.gaps.missing.size() << "\n";
            emit(os.str(), f.report, out);
            return r.messages > 0 ? kExitOk : kExitTransport;
        }
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << " (short by " << e.shortfall() << " bits)\n";
        return kExitCapacity;
    } catch (const SegmentationError& e) {
        err << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const ArgumentError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ChannelClosedError& e) {
        err << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const StreamConfusionError& e) {
        err << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

} // namespace mpstego
