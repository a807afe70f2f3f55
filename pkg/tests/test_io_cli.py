import os

import numpy as np
import pytest
from PIL import Image

from strainflow import io as sfio
from strainflow.cli import main
from strainflow.synth import value_noise_texture


def test_gray_png_roundtrip(tmp_path):
    f = value_noise_texture(13, 11, seed=0)
    path = str(tmp_path / "g.png")
    sfio.save_gray_png(f, path)
    back = sfio.load_image(path)
    assert back.shape == f.shape
    assert np.max(np.abs(back - f)) <= 1.0 / 255.0


def test_load_16bit_png(tmp_path):
    arr = (np.linspace(0, 1, 16 * 16).reshape(16, 16) * 65535).astype(np.uint16)
    path = str(tmp_path / "g16.png")
    Image.fromarray(arr).save(path)
    back = sfio.load_image(path)
    assert back.max() <= 1.0
    assert np.allclose(back, arr / 65535.0, atol=1e-6)


def test_load_rejects_color_shape(tmp_path):
    path = str(tmp_path / "c.png")
    Image.new("RGB", (8, 8), (10, 20, 30)).save(path)
    # color inputs are converted to grayscale, not rejected
    assert sfio.load_image(path).shape == (8, 8)


def test_fields_roundtrip(tmp_path):
    planes = np.random.default_rng(1).standard_normal((3, 6, 7))
    path = str(tmp_path / "x.fields")
    sfio.save_fields(path, planes, ["a", "b", "c"])
    back, names = sfio.load_fields(path)
    assert names == ["a", "b", "c"]
    assert back.shape == (3, 6, 7)
    assert np.allclose(back, planes, atol=1e-6)
    with pytest.raises(ValueError):
        sfio.save_fields(path, planes, ["a", "b"])


def test_fields_truncated(tmp_path):
    path = str(tmp_path / "x.fields")
    sfio.save_fields(path, np.zeros((1, 4, 4)), ["p"])
    with open(path, "rb") as fh:
        data = fh.read()
    with open(path, "wb") as fh:
        fh.write(data[:-8])
    with pytest.raises(ValueError, match="truncated"):
        sfio.load_fields(path)


def test_render_colormap(tmp_path):
    f = np.linspace(0, 1, 64).reshape(8, 8)
    path = str(tmp_path / "r.png")
    sfio.render_colormap(f, 0.0, 1.0, path)
    img = np.asarray(Image.open(path))
    assert img.shape == (8, 8, 3)
    lut = sfio.colormap_lut()
    assert tuple(img[0, 0]) == tuple(lut[0])
    assert tuple(img[-1, -1]) == tuple(lut[-1])
    with pytest.raises(ValueError):
        sfio.render_colormap(f, 1.0, 1.0, path)


def test_cli_synth_flow_render_pipeline(tmp_path):
    out = str(tmp_path / "synth")
    rc = main(["synth", "--size", "32", "--amplitude", "1.0", "--out", out])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "f1.png"))

    flow_out = str(tmp_path / "flow")
    rc = main([
        "flow", os.path.join(out, "f1.png"), os.path.join(out, "f2.png"),
        "--prior", "tv", "--iters", "60", "--out", flow_out, "--png",
    ])
    assert rc == 0
    planes, names = sfio.load_fields(os.path.join(flow_out, "flow.fields"))
    assert names == ["u1", "u2"] and planes.shape == (2, 32, 32)
    assert os.path.exists(os.path.join(flow_out, "strain.fields"))
    assert os.path.exists(os.path.join(flow_out, "u1.png"))

    img_out = str(tmp_path / "eps.png")
    rc = main(["render", os.path.join(flow_out, "strain.fields"), img_out, "--plane", "0"])
    assert rc == 0
    assert os.path.exists(img_out)


def test_cli_tgv_flow_uses_pyramid(tmp_path):
    out = str(tmp_path / "s")
    assert main(["synth", "--size", "24", "--out", out]) == 0
    flow_out = str(tmp_path / "f")
    rc = main([
        "flow", os.path.join(out, "f1.png"), os.path.join(out, "f2.png"),
        "--prior", "tgv", "--iters", "40", "--out", flow_out,
    ])
    assert rc == 0
    assert os.path.exists(os.path.join(flow_out, "smooth_part.fields"))


def test_cli_baseline_bm(tmp_path):
    out = str(tmp_path / "s")
    assert main(["synth", "--size", "24", "--out", out]) == 0
    bm_out = str(tmp_path / "bm")
    rc = main([
        "baseline-bm", os.path.join(out, "f1.png"), os.path.join(out, "f2.png"),
        "--window", "7", "--search", "2", "--out", bm_out,
    ])
    assert rc == 0
    assert os.path.exists(os.path.join(bm_out, "flow_bm.fields"))


def test_cli_compare_priors(tmp_path, capsys):
    out = str(tmp_path / "s")
    assert main(["synth", "--size", "20", "--out", out]) == 0
    cp_out = str(tmp_path / "cp")
    rc = main([
        "compare-priors", os.path.join(out, "f1.png"), os.path.join(out, "f2.png"),
        "--truth", os.path.join(out, "u_true.fields"),
        "--iters", "30", "--out", cp_out,
    ])
    assert rc == 0
    assert os.path.exists(os.path.join(cp_out, "compare_priors.json"))
    text = capsys.readouterr().out
    for prior in ("h1", "tv", "tgv", "ic"):
        assert prior in text


def test_cli_exit_codes(tmp_path):
    # missing input file -> 1
    assert main(["flow", "/no/such/f1.png", "/no/such/f2.png"]) == 1
    # bad parameter value -> 2
    out = str(tmp_path / "s")
    assert main(["synth", "--size", "20", "--out", out]) == 0
    rc = main([
        "flow", os.path.join(out, "f1.png"), os.path.join(out, "f2.png"),
        "--lambda1", "-1.0", "--iters", "5",
    ])
    assert rc == 2


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("size = 20\nout = %s\n" % (tmp_path / "via_cfg"))
    rc = main(["synth", "--config", str(cfg)])
    assert rc == 0
    assert os.path.exists(str(tmp_path / "via_cfg" / "f1.png"))


def test_cli_determinism(tmp_path):
    a = str(tmp_path / "a")
    b = str(tmp_path / "b")
    assert main(["synth", "--size", "24", "--seed", "3", "--out", a]) == 0
    assert main(["synth", "--size", "24", "--seed", "3", "--out", b]) == 0
    fa, _ = sfio.load_fields(os.path.join(a, "u_true.fields"))
    fb, _ = sfio.load_fields(os.path.join(b, "u_true.fields"))
    assert np.array_equal(fa, fb)
    assert sfio.load_image(os.path.join(a, "f1.png")).tobytes() == \
        sfio.load_image(os.path.join(b, "f1.png")).tobytes()
