import pytest

from mcdnn.arch_dsl import count_cost, feature_trace, infer_shapes, parse_arch, render_arch
from mcdnn.errors import ArchError, ShapeError, UsageError
from mcdnn.models.arch import ArchSpec, Conv, Full, MaxPool

NET3 = "48x48-100C3-MP2-200C2-MP2-300C2-MP2-400C2-MP2-500N-3755N"
NET0 = "48x48-150C3-MP2-250C2-MP2-350C2-MP2-450C2-MP2-1000N-3755N"


def test_parse_net3():
    spec = parse_arch(NET3)
    assert (spec.input_h, spec.input_w) == (48, 48)
    assert spec.layers == (
        Conv(100, 3), MaxPool(2), Conv(200, 2), MaxPool(2), Conv(300, 2), MaxPool(2),
        Conv(400, 2), MaxPool(2), Full(500), Full(3755),
    )
    assert spec.tag is None
    assert spec.class_count == 3755


def test_parse_minimal():
    spec = parse_arch("8x8-1C1-2N")
    assert spec.layers == (Conv(1, 1), Full(2))
    assert render_arch(ArchSpec(8, 8, (Conv(1, 1), Full(2)))) == "8x8-1C1-2N"


def test_fc_suffix_is_synonym():
    assert parse_arch("8x8-1C1-4FC-2FC") == parse_arch("8x8-1C1-4N-2N")
    assert render_arch(parse_arch("8x8-1C1-4FC-2FC")) == "8x8-1C1-4N-2N"


def test_trailing_number_is_tag():
    spec = parse_arch(NET0 + "-1365334845")
    assert spec.tag == "1365334845"
    assert spec.without_tag() == parse_arch(NET0)
    assert render_arch(spec) == NET0 + "-1365334845"


def test_render_roundtrip_without_tag():
    assert render_arch(parse_arch(NET3)) == NET3


@pytest.mark.parametrize("text", [
    NET3,
    "8x8-1C1-2N",
    "5x5-1C2-MP2-2N",
    "4x4-1C3-MP2-2N",
    "29x13-3C2-4C3-7N-7N-2N-42",
])
def test_parse_render_is_identity(text):
    spec = parse_arch(text)
    assert parse_arch(render_arch(spec)) == spec


def test_full_before_conv_is_rejected():
    with pytest.raises(ArchError) as info:
        parse_arch("48x48-2N-1C3")
    assert info.value.token_index == 2
    assert "token 2" in str(info.value)


@pytest.mark.parametrize("text", [
    "",
    "garbage",
    "48x48",
    "48-10C3-5N",
    "48x48-MP2-10N",
    "48x48-10C3",
    "48x48-10C3-MP1-5N",
    "48x48-0C3-5N",
    "48x48-10c3-5N",
    "48x48-10C3--5N",
    "48x48-10C3-0N",
])
def test_malformed_strings(text):
    with pytest.raises(ArchError):
        parse_arch(text)


def test_arch_errors_are_usage_errors():
    with pytest.raises(ValueError):
        parse_arch("nope")
    assert issubclass(ArchError, UsageError)
    assert ArchError.exit_code == 1


def test_net0_shape_trace():
    plan = infer_shapes(parse_arch(NET0))
    spatial = [layer.h for layer in plan.layers if layer.kind != "full"]
    assert spatial == [46, 23, 22, 11, 10, 5, 4, 2]
    first_full = next(layer for layer in plan.layers if layer.kind == "full")
    assert first_full.madds == 1000 * 1800
    assert first_full.params == 1000 * 1801
    assert feature_trace(parse_arch(NET0)) == "450×2×2 → 1000 → 3755"


def test_pool_divisibility():
    infer_shapes(parse_arch("4x4-1C3-MP2-2N"))
    plan = infer_shapes(parse_arch("5x5-1C2-MP2-2N"))
    assert (plan.layers[1].h, plan.layers[1].w) == (2, 2)
    with pytest.raises(ShapeError):
        parse_arch("5x5-1C3-MP2-2N")


def test_kernel_larger_than_input():
    with pytest.raises(ShapeError):
        parse_arch("4x4-1C5-2N")


def test_count_cost_small_cases():
    plan = infer_shapes(parse_arch("2x2-1C1-2N"))
    assert (plan.layers[1].params, plan.layers[1].madds) == (10, 8)
    plan = infer_shapes(parse_arch("8x8-1C1-2N"))
    assert (plan.layers[0].params, plan.layers[0].madds) == (2, 64)
    assert count_cost(plan) == (plan.total_params, plan.total_madds)


def test_total_params_is_layer_sum():
    plan = infer_shapes(parse_arch(NET3))
    assert plan.total_params == sum(layer.params for layer in plan.layers)
    assert count_cost(plan) == count_cost(infer_shapes(parse_arch(render_arch(parse_arch(NET3)))))


def test_published_networks(published_networks):
    costs = {}
    for net in published_networks:
        spec = parse_arch(net["arch"])
        assert render_arch(spec) == net["arch"]
        plan = infer_shapes(spec)
        last_spatial = [layer for layer in plan.layers if layer.kind != "full"][-1]
        assert (last_spatial.h, last_spatial.w) == (2, 2)
        sides = [layer.h for layer in plan.layers if layer.kind != "full"]
        assert sides == sorted(sides, reverse=True)
        costs[net["id"]] = plan.total_madds
    cheapest = sorted(costs, key=lambda k: (costs[k], k))[:2]
    assert set(cheapest) == {"3", "7"}


def test_shape_plan_json():
    plan = infer_shapes(parse_arch("8x8-1C1-2N"))
    data = plan.to_dict()
    assert data["total_params"] == plan.total_params
    assert len(data["layers"]) == 2
