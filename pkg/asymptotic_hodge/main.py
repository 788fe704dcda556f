"""
命令行入口
每个子命令读入实例文件、调用同名的模块操作，并把结果写成 JSON 或 CSV 报告。
退出码：0 通过，1 数学失败，2 解析/校验失败
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from asymptotic_hodge import __version__
from asymptotic_hodge.biext import (
    biext_metric_value,
    build_mu,
    central_action,
    delta_over_mu,
    phi_scan,
)
from asymptotic_hodge.config import Config
from asymptotic_hodge.demos import random_instance, write_shipped_instances
from asymptotic_hodge.exceptions import HodgeError, InputError, InstanceFormatError
from asymptotic_hodge.instance_io import (
    LoadedInstance,
    dump_instance,
    load_instance,
    parse_grid,
    parse_int_list,
    parse_point,
    parse_rational_list,
)
from asymptotic_hodge.limits import (
    naive_limit,
    reduced_limit_mixed,
    reduced_limit_pure,
    satake_comparison,
    satake_map,
    sequence_limit,
)
from asymptotic_hodge.linear_core import ExactComplex, Operator
from asymptotic_hodge.metrics import MetricMode, TwistSource, hodge_metric, tau
from asymptotic_hodge.mhs import (
    bigrading_of,
    delta_splitting,
    is_r_split,
    sl2_splitting,
    validate_instance,
)
from asymptotic_hodge.orbits.evaluation import (
    alpha_threshold,
    lnf_eval,
    orbit_eval,
    orbit_membership,
)
from asymptotic_hodge.orbits.scans import (
    ad_gamma_decay,
    distance_scan,
    p_function_scan,
    rel_compact_scan,
    scan_failure,
)
from asymptotic_hodge.orbits.sl2 import (
    gamma_weight_profile,
    limit_split,
    nilp_conv_check,
    sl2_triple_cone,
    sl2_triple_one_var,
    split_orbit_sl2,
)
from asymptotic_hodge.reports import to_json_text, write_atomic, write_report
from asymptotic_hodge.weightfilt import (
    NilpotentData,
    check_admissible_orbit,
    relative_weight_filtration,
)

logger = logging.getLogger(__name__)

Result = Tuple[Any, bool]

SCAN_COMMANDS = {
    "distance-scan",
    "rel-compact-scan",
    "phi-scan",
    "sequence-limit",
    "gamma-decay",
    "p-function-scan",
}


# ---------------------------------------------------------------------------
# 参数辅助
# ---------------------------------------------------------------------------


def _loaded(args) -> LoadedInstance:
    if not args.input:
        raise InstanceFormatError("该命令需要 --input", "input")
    return load_instance(args.input)


def _point(args, loaded: LoadedInstance):
    if not args.point:
        raise InstanceFormatError("该命令需要 --point x1:y1,...", "point")
    z = parse_point(args.point)
    rank = len(loaded.nilpotents)
    if len(z) != rank:
        raise InstanceFormatError(f"点的分量数 {len(z)} != 变量数 {rank}", "point_rank")
    return z


def _x(args):
    return parse_rational_list(args.x) if args.x else None


def _path(args):
    return parse_int_list(args.path) if args.path else None


def _grid(args, rank: int):
    if not args.grid:
        raise InstanceFormatError("该命令需要 --grid", "grid")
    return parse_grid(args.grid, rank, _x(args))


def _twist(args) -> TwistSource:
    return TwistSource(args.twist)


def _total_nilpotent(loaded: LoadedInstance) -> Operator:
    if not loaded.nilpotents:
        raise InstanceFormatError("实例中没有 nilpotents", "nilpotents")
    return loaded.orbit_spec().total_nilpotent()


def _sl2(loaded: LoadedInstance):
    return loaded.sl2 or split_orbit_sl2(loaded.orbit_spec())


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------


def cmd_validate(args, config: Config) -> Result:
    report = validate_instance(_loaded(args).instance)
    return report, report.passed


def cmd_bigrade(args, config: Config) -> Result:
    loaded = _loaded(args)
    inst = loaded.instance
    # 带幂零算子时取极限 MHS (F_∞, M)
    if loaded.nilpotents:
        weight = loaded.orbit_spec().limit_weight_filtration()
    else:
        weight = inst.W
    b = bigrading_of(inst.F, weight)
    payload = {
        "instance": inst.name,
        "weight_filtration": weight,
        "types": [list(t) for t in b.types],
        "bigrading": b.to_json(),
        "r_split": b.is_r_split(),
    }
    return payload, True


def cmd_split_delta(args, config: Config) -> Result:
    inst = _loaded(args).instance
    source = _twist(args)
    splitter = sl2_splitting if source is TwistSource.EPSILON else delta_splitting
    op, split = splitter(inst)
    payload = {
        "instance": inst.name,
        "source": source.value,
        "operator": op.to_json(),
        "is_zero": op.is_zero(),
        "split_filtration": split.F.to_json(),
        "r_split": is_r_split(split),
    }
    return payload, payload["r_split"]


def cmd_weight_filt(args, config: Config) -> Result:
    loaded = _loaded(args)
    data = NilpotentData(_total_nilpotent(loaded), loaded.weight or 0)
    M = data.weight_filtration()
    return {"center": data.center, "order": data.order, "W": M.to_json()}, True


def cmd_rel_weight_filt(args, config: Config) -> Result:
    loaded = _loaded(args)
    M = relative_weight_filtration(_total_nilpotent(loaded), loaded.instance.W)
    return {"M": M.to_json(), "weights": M.weights()}, True


def cmd_admissible_check(args, config: Config) -> Result:
    report = check_admissible_orbit(_loaded(args).orbit_spec())
    return report, report.passed


def cmd_metric(args, config: Config) -> Result:
    inst = _loaded(args).instance
    ctx = hodge_metric(inst, MetricMode(args.metric), _twist(args))
    return ctx, True


def cmd_tau(args, config: Config) -> Result:
    inst = _loaded(args).instance
    value = tau(inst, _twist(args))
    return {"instance": inst.name, "source": args.twist, "tau": value}, True


def cmd_orbit_eval(args, config: Config) -> Result:
    loaded = _loaded(args)
    spec = loaded.orbit_spec()
    z = _point(args, loaded)
    F = orbit_eval(spec, z)
    membership = orbit_membership(spec, z)
    return {"z": z, "filtration": F, "membership": membership}, membership.passed


def cmd_lnf_eval(args, config: Config) -> Result:
    loaded = _loaded(args)
    value = lnf_eval(loaded.orbit_spec(), loaded.gamma, _point(args, loaded))
    payload = {
        "z": value.z,
        "shift": value.shift,
        "translation": value.translation,
        "s": value.s,
        "filtration": value.filtration,
    }
    return payload, True


def cmd_sl2_triple(args, config: Config) -> Result:
    loaded = _loaded(args)
    spec = loaded.orbit_spec()
    if loaded.weight is None:
        raise InstanceFormatError("sl2-triple 需要纯实例（给出 weight）", "weight")
    _, hat = limit_split(spec)
    if spec.rank == 1:
        triple = sl2_triple_one_var(spec.nilpotents[0], hat, loaded.weight)
    else:
        y = [v.im for v in _point(args, loaded)] if args.point else [1] * spec.rank
        triple = sl2_triple_cone(spec, y)
    conv = nilp_conv_check(triple, hat, loaded.weight)
    return {"triple": triple, "relations": triple.relations(), "nilp_conv": conv}, conv


def _alpha(spec, config: Config) -> Optional[float]:
    threshold = alpha_threshold(spec, config.ALPHA_BISECTION_STEPS)
    return float(threshold) if threshold is not None else None


def cmd_distance_scan(args, config: Config) -> Result:
    loaded = _loaded(args)
    spec = loaded.orbit_spec()
    options = config.get_scan_options()
    report = distance_scan(
        spec,
        loaded.gamma,
        _grid(args, spec.rank),
        MetricMode(args.metric),
        _twist(args),
        threads=options["threads"],
        panels=options["panels"],
        window=options["slope_window"],
        alpha=_alpha(spec, config),
    )
    return report, report.passed


def cmd_rel_compact_scan(args, config: Config) -> Result:
    loaded = _loaded(args)
    spec = loaded.orbit_spec()
    options = config.get_scan_options()
    report = rel_compact_scan(
        spec,
        loaded.gamma,
        _sl2(loaded),
        _grid(args, spec.rank),
        eta=options["eta"],
        twist=not args.untwisted,
        threads=options["threads"],
    )
    report.alpha = _alpha(spec, config)
    return report, report.passed


def cmd_biext_metric(args, config: Config) -> Result:
    binst = _loaded(args).require_biextension()
    binst.check_shape()
    mu = build_mu(binst)
    value = biext_metric_value(binst)
    payload: Dict[str, Any] = {
        "delta_over_mu": delta_over_mu(binst.instance, mu),
        "metric": value,
        "one": binst.one,
        "one_dual": binst.one_dual,
    }
    if args.scale is not None:
        moved = central_action(binst, complex(args.scale))
        scaled = biext_metric_value(moved)
        payload["scaled"] = {"t": args.scale, "metric": scaled, "ratio": scaled / value}
    return payload, True


def cmd_phi_scan(args, config: Config) -> Result:
    loaded = _loaded(args)
    binst = loaded.require_biextension()
    spec = loaded.orbit_spec()
    report = phi_scan(spec, loaded.gamma, build_mu(binst), _sl2(loaded))
    return report, report.passed


def cmd_reduced_limit(args, config: Config) -> Result:
    loaded = _loaded(args)
    spec = loaded.orbit_spec()
    if args.path:
        limit = naive_limit(spec, _path(args), _x(args))
    elif loaded.weight is not None:
        limit = reduced_limit_pure(spec)
    else:
        limit = reduced_limit_mixed(spec, _sl2(loaded).Y0)
    return limit, True


def cmd_satake(args, config: Config) -> Result:
    spec = _loaded(args).orbit_spec()
    psi = satake_map(spec)
    comparison = satake_comparison(spec)
    passed = all(psi.checks.values()) and comparison["equal"]
    return {"satake": psi, "comparison": comparison}, passed


def cmd_sequence_limit(args, config: Config) -> Result:
    loaded = _loaded(args)
    spec = loaded.orbit_spec()
    points = _grid(args, spec.rank) if args.grid else None
    report = sequence_limit(
        spec,
        loaded.gamma,
        points,
        sl2=loaded.sl2,
        exponents=_path(args),
        tolerance=args.tolerance or config.SEQUENCE_TOLERANCE,
        threads=config.get_scan_options()["threads"],
    )
    return report, report.passed


def cmd_gamma_decay(args, config: Config) -> Result:
    loaded = _loaded(args)
    if loaded.gamma is None:
        raise InstanceFormatError("gamma-decay 需要实例中的 gamma", "gamma")
    spec = loaded.orbit_spec()
    report = ad_gamma_decay(
        spec,
        loaded.gamma,
        tolerance=args.tolerance or config.DECAY_TOLERANCE,
        threads=config.get_scan_options()["threads"],
    )
    if loaded.sl2 is not None:
        z = _point(args, loaded) if args.point else [ExactComplex(0, 1)] * spec.rank
        profile = gamma_weight_profile(spec, loaded.gamma, loaded.sl2, z)
        report.fit["weight_profile"] = profile
        report.passed = report.passed and profile["passed"]
    return report, report.passed


def cmd_p_function_scan(args, config: Config) -> Result:
    loaded = _loaded(args)
    rays = [_path(args)] if args.path else None
    report = p_function_scan(loaded.orbit_spec(), _sl2(loaded), rays)
    return report, report.passed


def cmd_demo(args, config: Config) -> Result:
    directory = Path(args.output or "instances")
    written = write_shipped_instances(directory)
    if args.seed is not None:
        inst = random_instance(args.seed)
        path = directory / f"{inst.name}.json"
        write_atomic(path, to_json_text(dump_instance(inst)))
        written.append(path)
    return {"written": [str(p) for p in written]}, True


COMMANDS: Dict[str, Callable[[argparse.Namespace, Config], Result]] = {
    "validate": cmd_validate,
    "bigrade": cmd_bigrade,
    "split-delta": cmd_split_delta,
    "weight-filt": cmd_weight_filt,
    "rel-weight-filt": cmd_rel_weight_filt,
    "admissible-check": cmd_admissible_check,
    "metric": cmd_metric,
    "tau": cmd_tau,
    "orbit-eval": cmd_orbit_eval,
    "lnf-eval": cmd_lnf_eval,
    "sl2-triple": cmd_sl2_triple,
    "distance-scan": cmd_distance_scan,
    "rel-compact-scan": cmd_rel_compact_scan,
    "biext-metric": cmd_biext_metric,
    "phi-scan": cmd_phi_scan,
    "reduced-limit": cmd_reduced_limit,
    "satake": cmd_satake,
    "sequence-limit": cmd_sequence_limit,
    "gamma-decay": cmd_gamma_decay,
    "p-function-scan": cmd_p_function_scan,
    "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymptotic-hodge",
        description="渐近混合 Hodge 理论的精确计算与数值扫描",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="子命令")
    parser.add_argument("--input", help="实例文件 (JSON, schema 1)")
    parser.add_argument("--output", help="报告输出路径；demo 命令为输出目录")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--grid", help='网格，例如 "y1=5:40:8,y2=2:10:5"')
    parser.add_argument(
        "--metric", choices=[m.value for m in MetricMode], default="standard"
    )
    parser.add_argument(
        "--twist", choices=[t.value for t in TwistSource], default="delta"
    )
    parser.add_argument("--tolerance", type=float, help="收敛/衰减阈值")
    parser.add_argument("--seed", type=int, help="随机实例的种子")
    parser.add_argument("--point", help='精确点 "x1:y1,x2:y2"')
    parser.add_argument("--path", help="射线 y_j = y^{a_j} 的指数，例如 2,1")
    parser.add_argument("--x", help="网格与路径的实部，例如 1/2,0")
    parser.add_argument("--scale", type=complex, help="双扩张中心作用的参数 t")
    parser.add_argument(
        "--untwisted", action="store_true", help="相对紧性扫描中省略 t^{-1}(y)"
    )
    return parser


def run(argv=None, config: Optional[Config] = None) -> int:
    """解析参数、执行子命令并写报告，返回退出码"""
    config = config or Config()
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command]
    precision = config.REPORT_PRECISION
    try:
        payload, passed = handler(args, config)
    except InputError as e:
        logger.error(f"输入错误 [{e.clause}]: {e}")
        return e.exit_code
    except HodgeError as e:
        logger.error(f"数学失败 [{e.clause}]: {e}")
        if args.command in SCAN_COMMANDS:
            failure = scan_failure(args.command, e)
            write_report(failure, args.output, args.format, precision)
        return e.exit_code

    if args.command == "demo":
        sys.stdout.write(to_json_text(payload))
        return 0
    text = write_report(payload, args.output, args.format, precision)
    if args.output is None:
        sys.stdout.write(text)
    if not passed:
        logger.warning(f"{args.command}: 检查未通过")
        return 1
    return 0


def main():
    config = Config()
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    sys.exit(run(config=config))


if __name__ == "__main__":
    main()
