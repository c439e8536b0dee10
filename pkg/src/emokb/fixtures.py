"""Deterministic fixture generators.

Everything under the repository's fixtures/ directory is produced by this
module (``python -m emokb.fixtures <dir>``), so the committed files can be
regenerated and byte-compared at any time. The generators are pure: no
randomness without a fixed seed, no timestamps.

The reference-count registry reproduces the published indicator census it is
checked against: 726 indicators split 7/1/296/13/41/30/99/16/136/87 across
the pattern classes and 142/1/583 across polarities. Curated entries come
first in each class; the remainder is synthesized from character pools with
global surface uniqueness enforced at build time.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

from .indicators import (
    BEI,
    Indicator,
    IndicatorRegistry,
    PATTERN_CLASSES,
    registry_stats,
    save_registry,
)
from .evaluate import ECEInstance


def _dedupe(chars: str) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for ch in chars:
        if ch not in seen:
            seen.add(ch)
            out.append(ch)
    return out


# Single-character action verbs used to fill morphological templates.
ACTION_CHARS = _dedupe(
    "拔查关标测喊拿吃嫁报写读认算改猜说听看走坐站放挂贴填选点按拨记背抄画排分发寄送买卖修装拆接递传翻数称剪缝洗擦"
    "扫拖倒搬抬推拉提扛搭盖铺叠折拼钉刻磨凿烤炒蒸炖煮烧烫切剁削刨锯钻敲挖掰拧捅拍顶踩踢跳跑爬游划驶骑驾载运邮汇"
    "存取借还付收缴罚扣押销毁弃扔藏躲避让挡堵封锁捆绑系挑担抱搂搀扶托举挥摇晃抖甩抛掷投喂养种植浇摘采割耕播撒施"
    "喷刷涂抹粘补订阅登攀蹬跨迈撞摸捏揉搓"
)

POSITIVE_RESULTS = _dedupe("成好完会中赢胜妥通顺")
NEGATIVE_RESULTS = _dedupe("坏糊砸偏丢碎伤断裂塌歪扁")

CLASSIC_INDICATORS = ("遭到", "遭受", "忍受", "饱受", "蒙受", "经受", "承受")

# curated heads per template class; synthesis pads each to its quota
CURATED_RESULTATIVE_NEGATIVE = ("踩坏", "炒糊", "考砸", "凿偏", "烤坏")
CURATED_RESULTATIVE_POSITIVE = ("办成", "修好", "学会", "考中", "打赢")
CURATED_BAI = ("写", "等", "去", "干", "说")
CURATED_V_PO = ("穿", "洗", "挤", "撑", "磕")
CURATED_CUO_V = ("喊", "拿", "吃", "嫁", "报")
CURATED_V_CUO = ("喊", "拿", "吃", "嫁", "报")
CURATED_V_DUI = ("猜", "算", "改", "写", "读")
CURATED_LOU = ("拔", "查", "关", "标", "测")

OTHER_POSITIVE = (
    "摆脱", "获得", "荣获", "打败", "免于", "赢得", "夺得", "斩获", "考取", "晋升",
    "升职", "晋级", "中标", "入选", "当选", "蝉联", "夺魁", "告捷", "康复", "痊愈",
    "愈合", "脱险", "脱困", "获释", "获准", "获批", "获评", "获颁", "受邀", "受聘",
    "受奖", "受赏", "得奖", "得救", "得益", "受益", "受惠", "圆梦", "如愿", "达标",
    "获益", "获利", "获赠", "获聘", "荣升", "荣登", "荣膺", "荣任", "喜获", "喜提",
    "喜得", "赢回", "夺回", "追回", "挽回", "赢下", "拿下", "攻下", "享受", "拥有",
    "迎来", "盼来", "等来", "换来", "博得", "争得", "挣得", "求得", "觅得", "寻得",
    "结识", "邂逅", "重逢", "团聚",
)

OTHER_NEGATIVE = (
    "痛失", "面临", "丢失", "惨遭", "身陷", "蒙冤", "沦为", "饱尝", "深陷", "受困",
    "失去", "遇挫", "受挫",
)

CLASS_QUOTAS = {
    "classic": 7,
    "neutral_bei": 1,
    "resultative_verb": 296,
    "bai_V": 13,
    "V_po": 41,
    "cuo_V": 30,
    "V_cuo": 99,
    "V_dui": 16,
    "lou_V": 136,
    "other": 87,
    "bei_composed": 0,
}

RESULTATIVE_POSITIVE_QUOTA = 52


class FixtureBuildError(RuntimeError):
    pass


def reference_count_registry() -> IndicatorRegistry:
    """The full 726-indicator registry with the published class and polarity
    distribution. Deterministic; regenerating always gives the same rows in
    the same order."""
    used: set[str] = set()
    rows: list[Indicator] = []

    def add(surface: str, polarity: str, pattern_class: str, origin: str):
        if surface in used:
            raise FixtureBuildError(f"surface collision while building: {surface!r}")
        used.add(surface)
        rows.append(Indicator(surface, polarity, pattern_class, origin))

    for surface in CLASSIC_INDICATORS:
        add(surface, "negative", "classic", "literature")
    add(BEI, "neutral", "neutral_bei", "literature")

    # resultative verbs: curated heads, then action x result products
    for surface in CURATED_RESULTATIVE_POSITIVE:
        add(surface, "positive", "resultative_verb", "literature")
    for surface in CURATED_RESULTATIVE_NEGATIVE:
        add(surface, "negative", "resultative_verb", "literature")
    need_pos = RESULTATIVE_POSITIVE_QUOTA - len(CURATED_RESULTATIVE_POSITIVE)
    need_neg = (
        CLASS_QUOTAS["resultative_verb"]
        - RESULTATIVE_POSITIVE_QUOTA
        - len(CURATED_RESULTATIVE_NEGATIVE)
    )
    for results, polarity, need in (
        (POSITIVE_RESULTS, "positive", need_pos),
        (NEGATIVE_RESULTS, "negative", need_neg),
    ):
        made = 0
        for action in ACTION_CHARS:
            for result in results:
                if made >= need:
                    break
                surface = action + result
                if surface in used:
                    continue
                add(surface, polarity, "resultative_verb", "literature")
                made += 1
            if made >= need:
                break
        if made < need:
            raise FixtureBuildError(f"resultative pool exhausted ({polarity})")

    def fill_template(pattern_class, curated, quota, skip=()):
        marker, position, polarity = {
            "bai_V": ("白", "prefix", "negative"),
            "V_po": ("破", "suffix", "negative"),
            "cuo_V": ("错", "prefix", "negative"),
            "V_cuo": ("错", "suffix", "negative"),
            "V_dui": ("对", "suffix", "positive"),
            "lou_V": ("漏", "prefix", "negative"),
        }[pattern_class]

        def surface_of(verb: str) -> str:
            return marker + verb if position == "prefix" else verb + marker

        taken: set[str] = set()
        for verb in curated:
            add(surface_of(verb), polarity, pattern_class, "template_expanded")
            taken.add(verb)
        for verb in ACTION_CHARS:
            if len(taken) >= quota:
                break
            if verb in taken or verb in skip or surface_of(verb) in used:
                continue
            add(surface_of(verb), polarity, pattern_class, "template_expanded")
            taken.add(verb)
        if len(taken) < quota:
            raise FixtureBuildError(f"action pool exhausted for {pattern_class}")

    fill_template("bai_V", CURATED_BAI, CLASS_QUOTAS["bai_V"], skip=("听",))
    fill_template("V_po", CURATED_V_PO, CLASS_QUOTAS["V_po"])
    fill_template("cuo_V", CURATED_CUO_V, CLASS_QUOTAS["cuo_V"])
    fill_template("V_cuo", CURATED_V_CUO, CLASS_QUOTAS["V_cuo"])
    fill_template("V_dui", CURATED_V_DUI, CLASS_QUOTAS["V_dui"])
    fill_template("lou_V", CURATED_LOU, CLASS_QUOTAS["lou_V"])

    result_chars = set(POSITIVE_RESULTS) | set(NEGATIVE_RESULTS)
    for group, polarity in ((OTHER_POSITIVE, "positive"), (OTHER_NEGATIVE, "negative")):
        for surface in group:
            if surface[-1] in result_chars:
                raise FixtureBuildError(
                    f"{surface!r} ends in a resultative char; pick another verb"
                )
            add(surface, polarity, "other", "literature")
    if len(OTHER_POSITIVE) + len(OTHER_NEGATIVE) != CLASS_QUOTAS["other"]:
        raise FixtureBuildError("'other' class quota mismatch")

    registry = IndicatorRegistry(rows)
    stats = registry_stats(registry)
    for cls in PATTERN_CLASSES:
        if stats.by_class[cls] != CLASS_QUOTAS[cls]:
            raise FixtureBuildError(
                f"class {cls}: built {stats.by_class[cls]}, want {CLASS_QUOTAS[cls]}"
            )
    if stats.by_polarity != {"positive": 142, "neutral": 1, "negative": 583}:
        raise FixtureBuildError(f"polarity counts off: {stats.by_polarity}")
    return registry


# ---------------------------------------------------------------------------
# Synthetic verb lexicon for 被 composition.

_VERB_FIRST = _dedupe("批赞责骂罚奖惩救助扶护管控查审训教劝逼催派调选聘录辞升降贬罢免")
_VERB_SECOND = _dedupe("评扬美备斥责罚奖惩助援持护理控查问训导诫告促遣动用取退职级黜")


def synthetic_verb_lexicon(count: int = 918) -> list[str]:
    """Two-character verbs for composing 被-indicators; none begin with 被."""
    combos = [a + b for a in _VERB_FIRST for b in _VERB_SECOND]
    if count > len(combos):
        raise FixtureBuildError(f"verb pools give {len(combos)}, need {count}")
    return combos[:count]


# ---------------------------------------------------------------------------
# Curated small registries.


def seed_registry() -> IndicatorRegistry:
    """A hand-sized registry of real indicators for demos and prune tests,
    including the weak (穿皱, 骑脏) and ambiguous (白听) entries that the
    pruning stage removes."""
    rows: list[Indicator] = []

    def add(surface, polarity, cls, origin, weak=False, ambiguous=False):
        rows.append(Indicator(surface, polarity, cls, origin, weak, ambiguous))

    for surface in CLASSIC_INDICATORS:
        add(surface, "negative", "classic", "literature")
    add(BEI, "neutral", "neutral_bei", "literature")
    for surface in ("办成", "修好", "学会", "考中", "打赢"):
        add(surface, "positive", "resultative_verb", "literature")
    for surface in ("弄丢", "打碎", "踩坏", "炒糊", "考砸", "摔坏"):
        add(surface, "negative", "resultative_verb", "literature")
    add("穿皱", "negative", "resultative_verb", "literature", weak=True)
    add("骑脏", "negative", "resultative_verb", "literature", weak=True)
    for surface in ("白跑", "白等", "白忙", "白写", "白说"):
        add(surface, "negative", "bai_V", "template_expanded")
    add("白听", "negative", "bai_V", "template_expanded", ambiguous=True)
    for surface in ("打破", "磨破", "穿破"):
        add(surface, "negative", "V_po", "template_expanded")
    for surface in ("错怪", "错拿", "错吃"):
        add(surface, "negative", "cuo_V", "template_expanded")
    for surface in ("写错", "拿错", "吃错"):
        add(surface, "negative", "V_cuo", "template_expanded")
    for surface in ("答对", "猜对", "写对"):
        add(surface, "positive", "V_dui", "template_expanded")
    for surface in ("漏写", "漏查", "漏看"):
        add(surface, "negative", "lou_V", "template_expanded")
    for surface in ("摆脱", "获得", "荣获", "免于", "赢得"):
        add(surface, "positive", "other", "literature")
    for surface in ("面临", "丢失", "痛失"):
        add(surface, "negative", "other", "literature")
    for surface in (
        "被禁止", "被控制", "被忽悠", "被开除", "被救助", "被攻击",
        "被列入", "被没收", "被拒绝", "被报复", "被扣除", "被善待",
    ):
        add(surface, "neutral", "bei_composed", "bei_composed")
    return IndicatorRegistry(rows)


def harvest_demo_registry() -> IndicatorRegistry:
    """Ten active indicators spanning the pattern classes; the end-to-end
    mock harvest fixture."""
    rows = [
        Indicator("遭受", "negative", "classic", "literature"),
        Indicator("获得", "positive", "other", "literature"),
        Indicator("丢失", "negative", "other", "literature"),
        Indicator("白跑", "negative", "bai_V", "template_expanded"),
        Indicator("写错", "negative", "V_cuo", "template_expanded"),
        Indicator("答对", "positive", "V_dui", "template_expanded"),
        Indicator("漏写", "negative", "lou_V", "template_expanded"),
        Indicator("打破", "negative", "V_po", "template_expanded"),
        Indicator("被禁止", "neutral", "bei_composed", "bei_composed"),
        Indicator("被没收", "neutral", "bei_composed", "bei_composed"),
    ]
    return IndicatorRegistry(rows)


IMPLICIT_EVENTS = (
    ("盈利", "positive"),
    ("成功", "positive"),
    ("夺冠", "positive"),
    ("中奖", "positive"),
    ("获救", "positive"),
    ("获奖", "positive"),
    ("中毒", "negative"),
    ("上当", "negative"),
    ("失业", "negative"),
    ("生病", "negative"),
    ("死亡", "negative"),
    ("摔倒", "negative"),
)

# (event surface, indicator surface, expected polarity) for the three
# assignment routes; these are the curated reference classifications.
REFERENCE_EXPLICIT_CLASSIFICATIONS = (
    ("摆脱疾病的折磨", "摆脱", "positive"),
    ("荣获优秀员工奖", "荣获", "positive"),
    ("获得家人的理解", "获得", "positive"),
    ("打败强大的对手", "打败", "positive"),
    ("免于刑事处罚", "免于", "positive"),
    ("遭受痛苦", "遭受", "negative"),
    ("面临职业发展的困境", "面临", "negative"),
    ("错吃发霉的饼干", "错吃", "negative"),
    ("丢失钱包", "丢失", "negative"),
    ("白等一个结果", "白等", "negative"),
)

REFERENCE_BEI_CLASSIFICATIONS = (
    ("被善待", "被", "positive"),
    ("被体谅工作压力大", "被体谅", "positive"),
    ("被同意出国旅行", "被同意", "positive"),
    ("被夸奖有责任心", "被夸奖", "positive"),
    ("被协助完成任务", "被协助", "positive"),
    ("被拒绝", "被", "negative"),
    ("被禁止参加婚礼", "被禁止", "negative"),
    ("被没收手机", "被没收", "negative"),
    ("被忽悠购买减肥产品", "被忽悠", "negative"),
    ("被攻击头部", "被攻击", "negative"),
)

REFERENCE_NEUTRAL_BEI_EVENTS = ("被安排参加会议", "被模仿舞蹈动作")

CONFISCATION_EVENT_THEMES = (
    "财产", "手机", "护照", "钥匙", "信用卡", "电子设备", "电脑", "首饰", "书籍",
)

# A real annotated extraction instance: the cause span sits in its own clause
# and the keyword span in the following one.
REFERENCE_ECE_RECORD = (
    "1999年春天，平邑县白彦镇大营村支部书记王某因与村主任桂某关系不和，"
    "<cause>遭到桂某等人殴打</cause>，王某的儿子心生<keyword>怨恨</keyword>，"
    "又伙同他人将桂某殴打致轻伤，随后，桂向法院提起自诉，"
    "但因事实不清、证据不足而撤诉"
)

_EXTRA_ECE_RECORDS = (
    "小李准备了很久的考试，最终<cause>错过了报名时间</cause>，"
    "他感到十分<keyword>懊悔</keyword>，只能等待下一次机会",
    "公司经营状况持续恶化，<cause>他失去了工作</cause>，"
    "一家人陷入<keyword>焦虑</keyword>，生活变得拮据",
    "球队苦练一年，<cause>终于赢得了冠军</cause>，队员们无比<keyword>喜悦</keyword>，"
    "教练也流下了眼泪",
    "她走在回家的路上，<cause>钱包被小偷偷走</cause>，顿时非常<keyword>气愤</keyword>，"
    "立刻报了警",
)


def ece_sample_corpus() -> str:
    """Five-instance extraction corpus in the inline-markup record format."""
    return "\n\n".join((REFERENCE_ECE_RECORD,) + _EXTRA_ECE_RECORDS) + "\n"


# ---------------------------------------------------------------------------
# Synthetic ablation corpus: the indicator bit is a perfect cause signal and
# the n-gram surface gives a fold-crossing learner nothing to hold on to.

_RARE_CHARS = _dedupe(
    "彧劼暔烨琰祎翀颀竑翊昶昱煜赟骁珩璟瑄琮琛璩玚珣瑭珉琤瑀璞琨瑾璇玑"
)
_FILLER_CHARS = _dedupe("同与而则乃共并且及其诸多少许若干此彼往来日月年")


def build_ablation_corpus(
    seed: int = 0, n_instances: int = 100
) -> tuple[list[ECEInstance], IndicatorRegistry]:
    """Instances whose cause clauses each open with a two-character cue that
    appears nowhere else in the corpus; the registry lists every cue. A model
    with the cue-presence bit can separate causes perfectly, one without it
    cannot generalize across folds."""
    combos = [a + b for a in _RARE_CHARS for b in _RARE_CHARS]
    if n_instances * 2 > len(combos):
        raise FixtureBuildError("rare-char pool too small")
    rng = random.Random(f"{seed}:ablation")
    rng.shuffle(combos)
    cursor = 0

    def filler(length: int) -> str:
        return "".join(rng.choice(_FILLER_CHARS) for _ in range(length))

    instances: list[ECEInstance] = []
    indicator_rows: list[Indicator] = []
    for _ in range(n_instances):
        n_clauses = rng.randint(4, 7)
        n_causes = rng.randint(1, 2)
        cause_idx = set(rng.sample(range(n_clauses), n_causes))
        keyword_choices = [i for i in range(n_clauses) if i not in cause_idx]
        keyword_idx = rng.choice(keyword_choices)
        clauses: list[str] = []
        for idx in range(n_clauses):
            if idx in cause_idx:
                cue = combos[cursor]
                cursor += 1
                indicator_rows.append(Indicator(cue, "negative", "other", "manual"))
                clauses.append(cue + filler(rng.randint(3, 6)))
            else:
                clauses.append(filler(rng.randint(4, 8)))
        instances.append(
            ECEInstance(
                clauses=tuple(clauses),
                keyword_clause=keyword_idx,
                cause_clauses=frozenset(cause_idx),
            )
        )
    return instances, IndicatorRegistry(indicator_rows)


def instances_to_markup(instances: list[ECEInstance]) -> str:
    """Render instances back into the blank-line-separated record format.
    The keyword span wraps the keyword clause's first two characters."""
    records = []
    for instance in instances:
        parts = []
        for idx, clause in enumerate(instance.clauses):
            if idx in instance.cause_clauses:
                parts.append(f"<cause>{clause}</cause>")
            elif idx == instance.keyword_clause:
                parts.append(f"<keyword>{clause[:2]}</keyword>{clause[2:]}")
            else:
                parts.append(clause)
        records.append("，".join(parts))
    return "\n\n".join(records) + "\n"


# ---------------------------------------------------------------------------
# Published-run accounting metadata.

PUBLISHED_RUN_COUNTS = {
    "raw_generation": {
        "parts": {"explicit_nonneutral": 52512, "bei": 68488, "implicit": 182},
        "total": 121182,
    },
    "post_filter_kb": {
        "parts": {"explicit_nonneutral": 44282, "bei": 57754, "implicit": 182},
        "total": 102218,
    },
    "coverage_reference": {"matched": 2571, "total": 260662},
}


# ---------------------------------------------------------------------------
# File emission.


def write_fixture_files(out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, content: str) -> None:
        path = out / name
        path.write_text(content, encoding="utf-8")
        written.append(path)

    registry = reference_count_registry()
    save_registry(registry, out / "reference-counts.tsv")
    written.append(out / "reference-counts.tsv")
    emit(
        "reference-counts.meta.json",
        json.dumps(registry_stats(registry).as_json_dict(), ensure_ascii=False, indent=2)
        + "\n",
    )

    save_registry(seed_registry(), out / "seed-registry.tsv")
    written.append(out / "seed-registry.tsv")
    save_registry(harvest_demo_registry(), out / "registry-10.tsv")
    written.append(out / "registry-10.tsv")

    emit("verbs-918.txt", "\n".join(synthetic_verb_lexicon(918)) + "\n")
    emit("verbs-small.txt", "\n".join(synthetic_verb_lexicon(12)) + "\n")

    implicit_lines = ["surface\tpolarity"]
    implicit_lines += [f"{s}\t{p}" for s, p in IMPLICIT_EVENTS]
    emit("implicit-events.tsv", "\n".join(implicit_lines) + "\n")

    emit(
        "published-run-counts.json",
        json.dumps(PUBLISHED_RUN_COUNTS, ensure_ascii=False, indent=2) + "\n",
    )

    emit("ece-sample.txt", ece_sample_corpus())

    instances, ablation_registry = build_ablation_corpus(seed=0, n_instances=100)
    emit("ablation-corpus.txt", instances_to_markup(instances))
    save_registry(ablation_registry, out / "ablation-registry.tsv")
    written.append(out / "ablation-registry.tsv")

    return written


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    out_dir = args[0] if args else "fixtures"
    written = write_fixture_files(out_dir)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
