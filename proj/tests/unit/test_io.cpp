#include "doctest.h"

#include "sonavol/config.hpp"
#include "sonavol/mask.hpp"
#include "sonavol/mls.hpp"
#include "sonavol/wav.hpp"

#include <png.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace sonavol;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "sonavol_unit";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("WAV keeps +-1 sequences and the sample rate exactly") {
    EchoTrace t{mls::generate_mls(10).samples(), 48000.0, TraceRole::Reference};
    std::stringstream buf;
    wav::write(buf, t);
    CHECK(buf.str().size() == 44 + 2 * 1023);
    const auto back = wav::read(buf, TraceRole::Reference);
    CHECK(back.samples == t.samples);
    CHECK(back.sample_rate == 48000.0);
    CHECK(back.role == TraceRole::Reference);
}

TEST_CASE("WAV quantisation error is bounded by half a step") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    EchoTrace t{std::vector<double>(5000), 44100.0};
    for (double& v : t.samples) v = u(rng);
    std::stringstream buf;
    wav::write(buf, t);
    const auto back = wav::read(buf);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(back.samples[i] - t.samples[i]) <= 0.5 / 32767.0 + 1e-15);
    }
}

TEST_CASE("WAV peak normalisation and clipping") {
    EchoTrace t{{0.0, 3.0, -1.5}, 48000.0};
    std::stringstream norm, clip;
    wav::write(norm, t, wav::Scaling::NormalizePeak);
    wav::write(clip, t);
    const auto n = wav::read(norm);
    CHECK(n.samples[1] == doctest::Approx(wav::kNormalizedPeak).epsilon(1e-4));
    CHECK(n.samples[2] == doctest::Approx(-0.5 * wav::kNormalizedPeak).epsilon(1e-4));
    const auto c = wav::read(clip);
    CHECK(c.samples[1] == 1.0);
    CHECK(c.samples[2] == -1.0);
}

TEST_CASE("WAV reader rejects unsupported files") {
    std::stringstream junk("not a wav file at all");
    CHECK_THROWS(wav::read(junk));

    // Valid stereo header.
    EchoTrace t{{0.1, 0.2}, 8000.0};
    std::stringstream buf;
    wav::write(buf, t);
    std::string bytes = buf.str();
    bytes[22] = 2; // channel count
    std::stringstream stereo(bytes);
    CHECK_THROWS_WITH(wav::read(stereo), doctest::Contains("mono"));

    std::stringstream truncated(buf.str().substr(0, 30));
    CHECK_THROWS(wav::read(truncated));
}

TEST_CASE("WAV reader skips unknown chunks") {
    EchoTrace t{{0.5, -0.5}, 16000.0};
    std::stringstream buf;
    wav::write(buf, t);
    std::string bytes = buf.str();
    const std::string extra = std::string("LIST") + std::string("\x03\x00\x00\x00", 4) + "abc" + std::string(1, '\0');
    bytes.insert(36, extra);
    std::stringstream in(bytes);
    const auto back = wav::read(in);
    CHECK(back.size() == 2);
    CHECK(back.sample_rate == 16000.0);
}

TEST_CASE("PGM masks round-trip") {
    std::mt19937 rng(8);
    std::bernoulli_distribution bit(0.3);
    FoodMask m(37, 21, View::Side);
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 37; ++x) m.set(x, y, bit(rng));
    const auto path = scratch("mask.pgm");
    mask_io::write_pgm(path, m);
    const auto back = mask_io::read_mask(path, View::Side);
    CHECK(back.same_pixels(m));
    CHECK(back.view() == View::Side);
}

TEST_CASE("PGM header comments and grey levels") {
    const auto path = scratch("comment.pgm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n# made by hand\n3 2\n255\n";
        const unsigned char px[6] = {0, 1, 0, 200, 0, 255};
        out.write(reinterpret_cast<const char*>(px), 6);
    }
    const auto m = mask_io::read_pgm(path, View::Top);
    CHECK(m.count() == 3);
    CHECK(m.at(1, 0));
    CHECK(m.at(2, 1));
}

TEST_CASE("PGM reader rejects other formats") {
    const auto path = scratch("ascii.pgm");
    {
        std::ofstream out(path);
        out << "P2\n2 2\n255\n0 1 0 1\n";
    }
    CHECK_THROWS(mask_io::read_pgm(path, View::Top));
    CHECK_THROWS(mask_io::read_mask(path, View::Top));
    CHECK_THROWS(mask_io::read_mask(scratch("does-not-exist.pgm"), View::Top));
}

TEST_CASE("PNG masks are read as greyscale") {
    const auto path = scratch("mask.png");
    std::vector<std::uint8_t> px(6 * 4, 0);
    px[5] = 255;
    px[13] = 7;
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = 6;
    img.height = 4;
    img.format = PNG_FORMAT_GRAY;
    REQUIRE(png_image_write_to_file(&img, path.string().c_str(), 0, px.data(), 0, nullptr));
    const auto m = mask_io::read_mask(path, View::Top);
    CHECK(m.width() == 6);
    CHECK(m.height() == 4);
    CHECK(m.count() == 2);
    CHECK(m.at(5, 0));
    CHECK(m.at(1, 2));
}

TEST_CASE("config parsing") {
    const auto j = nlohmann::json::parse(R"({
        "camera": {"focal_length_m": 0.004, "sensor_width_m": 0.005, "image_width_px": 4000},
        "ranging": {"speaker_mic_distance_m": 0.15, "max_attempts": 7, "parabolic_interpolation": false},
        "mls": {"order": 12},
        "container": "bowl",
        "calibration": {"mode": "explicit-side-scale", "side_scale_m_per_px": 0.0002},
        "scenario": {"echo_gain": 0.3, "noise_snr_db": "restaurant", "delay_mode": "fractional"},
        "channel": {"paths": [{"delay_s": 0.0}, {"delay_s": 0.001, "gain": 0.4}], "noise_snr_db": null}
    })");
    const auto c = config_from_json(j);
    CHECK(c.camera.image_width_px == 4000);
    CHECK(c.ranging.speaker_mic_distance == 0.15);
    CHECK(c.ranging.max_attempts == 7);
    CHECK_FALSE(c.ranging.parabolic_interpolation);
    CHECK(c.ranging.speed_of_sound == 343.0);
    CHECK(c.mls_order == 12);
    CHECK(c.container == ContainerClass::Bowl);
    CHECK(c.side_scale == 0.0002);
    CHECK(c.scenario.noise_snr_db == 10.0);
    CHECK(c.scenario.delay_mode == channel::DelayMode::Fractional);
    REQUIRE(c.channel.has_value());
    CHECK(c.channel->paths.size() == 2);
    CHECK(c.channel->paths[0].gain == 1.0);
    CHECK_FALSE(c.channel->noise_snr_db.has_value());

    const auto round = channel_from_json(to_json(*c.channel));
    CHECK(round.paths[1].delay_s == 0.001);
}

TEST_CASE("calibration mode follows the side scale") {
    CHECK(config_from_json(nlohmann::json::parse(R"({"calibration": {"side_scale_m_per_px": 0.001}})")).side_scale ==
          0.001);
    CHECK_FALSE(config_from_json(nlohmann::json::parse(R"({"calibration": {}})")).side_scale.has_value());
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(
                        R"({"calibration": {"mode": "width-matching", "side_scale_m_per_px": 0.001}})")),
                    std::invalid_argument);
}

TEST_CASE("config rejects typos and invalid values") {
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"camra": {}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"ranging": {"max_attempt": 3}})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"mls": {"order": 30}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"container": "cup"})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"channel": {"paths": []}})")), std::invalid_argument);
    CHECK_NOTHROW(config_from_json(nlohmann::json::object()));
}
