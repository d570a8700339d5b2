"""Acceptance suite: nine numbered criteria, one scoreboard line each.

Every test prints `[criterion N] PASS/FAIL <label>` directly to the terminal
(bypassing capture) so a full run reads as a nine-line scoreboard. Criteria
with a wall-clock budget assert it; the measured time is part of the line.
"""

import dataclasses
import re
import time
from random import Random

import pytest

from conftest import load_bad_fixture
from hlslab.arith import crt_combine
from hlslab.attacks import (
    forward_secrecy_break,
    invalid_curve_attack,
    recover_sender_key,
)
from hlslab.curve import (
    INFINITY,
    CurveParams,
    Point,
    find_invalid_curve_point,
    is_on_curve,
    point_add,
    point_neg,
    scalar_mul,
    search_prime_order_curve,
)
from hlslab.errors import ForcedEphemeralError, InvalidEphemeralKeyError
from hlslab.hls import (
    ConfirmPolicy,
    Mode,
    SigncryptedText,
    confirmation_oracle,
    gen,
    signcrypt,
    unsigncrypt,
)
from hlslab.pki import (
    CAPolicy,
    CertificateAuthority,
    validate_certificate,
    validate_domain_params,
    validate_public_key,
)
from hlslab.primitives import derive_key, stream_encrypt
from hlslab.scenarios import (
    FIXED_NOW,
    SCENARIOS,
    default_g_budget,
    make_decryptor,
    run_uks,
)


def _scoreboard(capsys, num: int, label: str, budget_s, body) -> None:
    """Run one criterion body, then print its PASS/FAIL line uncaptured."""
    start = time.perf_counter()
    try:
        body()
        elapsed = time.perf_counter() - start
        if budget_s is not None:
            assert elapsed < budget_s, f"took {elapsed:.2f}s, budget {budget_s}s"
    except BaseException:
        elapsed = time.perf_counter() - start
        with capsys.disabled():
            print(f"[criterion {num}] FAIL {label} ({elapsed:.2f}s)")
        raise
    timing = f"{elapsed:.2f}s" + (f" < {budget_s}s" if budget_s is not None else "")
    with capsys.disabled():
        print(f"[criterion {num}] PASS {label} ({timing})")


def test_criterion_1_roundtrips(capsys, toy, secp256k1):
    def body():
        rng = Random(1001)
        for _ in range(200):
            alice, bob = gen(toy, rng), gen(toy, rng)
            message = rng.randbytes(rng.randrange(0, 1025))
            sigma = signcrypt(message, alice.d, bob.pub, toy, rng)
            assert unsigncrypt(sigma, bob.d, alice.pub, toy) == message
        rng = Random(1002)
        for _ in range(50):
            alice, bob = gen(secp256k1, rng), gen(secp256k1, rng)
            message = rng.randbytes(rng.randrange(0, 1025))
            sigma = signcrypt(message, alice.d, bob.pub, secp256k1, rng)
            assert unsigncrypt(sigma, bob.d, alice.pub, secp256k1) == message

    _scoreboard(capsys, 1, "200 toy + 50 secp256k1 roundtrips", 30, body)


def test_criterion_2_ephemeral_leak(capsys, toy):
    def body():
        rng = Random(1101)
        for _ in range(100):
            alice, bob = gen(toy, rng), gen(toy, rng)
            leaked_r = rng.randrange(1, toy.n)
            message = rng.randbytes(32)
            sigma = signcrypt(message, alice.d, bob.pub, toy, rng, forced_r=leaked_r)
            recovered = recover_sender_key(leaked_r, sigma, bob.pub, toy)
            assert recovered == alice.d
            assert scalar_mul(recovered, toy.g, toy) == alice.pub

    _scoreboard(capsys, 2, "sender-key recovery from a leaked ephemeral, 100/100", 10, body)


def test_criterion_3_forward_secrecy(capsys, secp256k1):
    # h == 0 would make r unrecoverable, but on a 256-bit group that draw
    # has probability ~2^-256; seeds here are safe to freeze.
    def body():
        e = secp256k1
        for seed in range(100):
            rng = Random(3000 + seed)
            alice, bob = gen(e, rng), gen(e, rng)
            message = rng.randbytes(64)
            true_r = Random(9000 + seed).randrange(1, e.n)
            sigma = signcrypt(message, alice.d, bob.pub, e, Random(9000 + seed))
            decryptor = make_decryptor(bob, alice.pub, e, Mode.VULNERABLE)
            report = forward_secrecy_break(alice.d, sigma, bob.pub, decryptor, e)
            assert report.success
            assert report.recovered["r"] == true_r
            key = derive_key(scalar_mul(true_r, bob.pub, e), e, Mode.VULNERABLE)
            assert stream_encrypt(key, sigma.ciphertext) == message

    _scoreboard(capsys, 3, "forward-secrecy break, exact ephemeral, 100/100", 10, body)


def test_criterion_4_invalid_curve(capsys, mid16):
    round_re = re.compile(r"g=(\d+):.*after (\d+) trials \(bound (\d+)\)")

    def body():
        found = search_prime_order_curve(2**14, 2**16, Random(20080917))
        assert found == mid16
        budget = default_g_budget(mid16)
        assert budget == [3, 5, 7, 11, 13, 17]
        for seed in range(10):
            rng = Random(4000 + seed)
            alice, bob = gen(mid16, rng), gen(mid16, rng)

            def oracle(sigma, confirm_message, _bob=bob, _alice=alice):
                return confirmation_oracle(
                    sigma, _bob.d, _alice.pub, mid16, confirm_message,
                    ConfirmPolicy.CONFIRM_ALWAYS,
                )

            report = invalid_curve_attack(
                mid16, bob.pub, oracle, b"confirm receipt", budget, rng
            )
            assert report.success
            assert report.recovered["d_B"] == bob.d
            assert scalar_mul(report.recovered["d_B"], mid16.g, mid16) == bob.pub
            assert report.oracle_queries == len(budget)
            rounds = [m for line in report.transcript if (m := round_re.search(line))]
            assert [int(m.group(1)) for m in rounds] == budget
            for m in rounds:
                g, trials, bound = (int(m.group(i)) for i in (1, 2, 3))
                assert bound == g // 2 + 1
                assert trials <= bound

    _scoreboard(capsys, 4, "invalid-curve recovery on the searched 16-bit curve, 10/10", 120, body)


def test_criterion_5_hardening_blocks_everything(capsys, toy, mid16):
    def body():
        for name in ("ephemeral-leak", "forward-secrecy", "invalid-curve", "zero-r", "uks"):
            for seed in range(10):
                report = SCENARIOS[name](toy, Mode.HARDENED, Random(5000 + seed))
                assert not report.success, (name, seed)
        # every attack point dies at checklist item (c) before any K exists
        for e, budget in ((toy, [3, 7]), (mid16, [3, 5, 7, 11, 13, 17])):
            for g in budget:
                w = find_invalid_curve_point(e, g).point
                report = validate_public_key(w, e)
                names = [c.name for c in report.checks]
                assert names == ["nonzero", "coordinate-range", "on-curve"]
                assert report.checks[0].passed and report.checks[1].passed
                assert not report.checks[2].passed
                sigma = SigncryptedText(ciphertext=b"\x00", ephemeral=w, signature=1)
                with pytest.raises(InvalidEphemeralKeyError):
                    confirmation_oracle(
                        sigma, 1, e.g, e, b"confirm", ConfirmPolicy.HARDENED
                    )

    _scoreboard(capsys, 5, "hardened mode blocks all five scenarios, 0/10 each", None, body)


def test_criterion_6_zero_ephemeral(capsys, toy):
    def body():
        rng = Random(1601)
        for _ in range(20):
            alice, bob = gen(toy, rng), gen(toy, rng)
            message = rng.randbytes(16)
            sigma = signcrypt(message, alice.d, bob.pub, toy, rng, forced_r=0)
            assert sigma.signature == alice.d
            assert sigma.ephemeral.is_infinity
            with pytest.raises(ForcedEphemeralError):
                signcrypt(message, alice.d, bob.pub, toy, rng,
                          mode=Mode.HARDENED, forced_r=0)

    _scoreboard(capsys, 6, "forced r=0 emits s == d_A; hardened refuses, 20/20", None, body)


def test_criterion_7_unknown_key_share(capsys, toy):
    def body():
        for seed in range(10):
            report = run_uks(toy, Mode.VULNERABLE, Random(1700 + seed))
            assert report.success, seed
        for seed in range(10):
            report = run_uks(toy, Mode.HARDENED, Random(1700 + seed))
            assert not report.success, seed
            assert any("blocked at issuance" in line for line in report.transcript)

    _scoreboard(capsys, 7, "key-share confusion 10/10; PoP policy refuses 10/10", None, body)


def test_criterion_8_validation_suites(capsys, toy):
    def body():
        assert validate_domain_params(toy, embedding_bound=8).ok
        fixtures = {
            "bad_composite_n": (8, "order-prime"),
            "bad_small_order": (8, "hasse-margin"),
            "bad_anomalous": (8, "anomalous"),
            "bad_embedding": (20, "embedding-degree"),
            "bad_base_point": (8, "base-point-on-curve"),
        }
        for name, (bound, intended) in fixtures.items():
            bad = load_bad_fixture(name)
            report = validate_domain_params(bad, embedding_bound=bound)
            assert report.failed_names() == [intended], name
        # a base point of None coordinates is unserializable, built inline
        singular = CurveParams(q=17, a=3, b=8, g=INFINITY, n=47, cofactor=1)
        report = validate_domain_params(singular, embedding_bound=8)
        assert report.failed_names() == ["nonsingular"]

        rng = Random(1801)
        ca = CertificateAuthority(keypair=gen(toy, rng), curve=toy, rng=rng)
        alice = gen(toy, rng)
        cert = ca.issue("Alice", alice.pub, FIXED_NOW, 1000)
        assert validate_certificate(cert, ca.pub, FIXED_NOW, (), toy).ok
        expired = validate_certificate(cert, ca.pub, FIXED_NOW + 2000, (), toy)
        assert expired.failed_names() == ["expiry"]
        revoked = validate_certificate(cert, ca.pub, FIXED_NOW, (cert.serial,), toy)
        assert revoked.failed_names() == ["revocation"]
        forged = dataclasses.replace(cert, subject="Mallory")
        report = validate_certificate(forged, ca.pub, FIXED_NOW, (), toy)
        assert report.failed_names() == ["signature"]

    _scoreboard(capsys, 8, "each crafted defect fails exactly its intended check", None, body)


def test_criterion_9_oracle_equivalence(capsys, toy):
    def body():
        acc = INFINITY
        for k in range(2 * toy.n + 1):
            assert scalar_mul(k, toy.g, toy) == acc
            acc = point_add(acc, toy.g, toy)

        points = [INFINITY] + [
            Point(x, y)
            for x in range(toy.q)
            for y in range(toy.q)
            if is_on_curve(Point(x, y), toy)
        ]
        assert len(points) == toy.n
        universe = set(points)
        for p in points:
            assert point_add(p, INFINITY, toy) == p
            assert point_add(p, point_neg(p, toy), toy).is_infinity
        sums = {}
        for p in points:
            for q in points:
                total = point_add(p, q, toy)
                assert total in universe
                sums[(p, q)] = total
        for p in points:
            for q in points:
                assert sums[(p, q)] == sums[(q, p)]
                for w in points:
                    assert sums[(sums[(p, q)], w)] == sums[(p, sums[(q, w)])]

        rng = Random(1901)
        large = [53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
        small = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        for _ in range(100):
            moduli = [rng.choice(large)]
            product = moduli[0]
            for p in rng.sample(small, rng.randrange(1, 5)):
                if product * p > 10**6:
                    break
                moduli.append(p)
                product *= p
            pairs = [(rng.randrange(m), m) for m in moduli]
            combined = crt_combine(pairs)
            step_r, step_m = max(pairs, key=lambda rm: rm[1])
            scan = next(
                x for x in range(step_r, product, step_m)
                if all(x % m == r for r, m in pairs)
            )
            assert combined == scan

    _scoreboard(capsys, 9, "scalar-mul, group-axiom, and CRT oracle agreement", 10, body)
