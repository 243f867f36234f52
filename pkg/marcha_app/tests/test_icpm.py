"""
Tests for the impulse-controlled Poincaré map and the discrete LQR.
"""
import tempfile
from pathlib import Path
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase
from scipy.linalg import solve_discrete_are

from marcha_app.core.constantes import ARQUIVOS_MATRIZES, MotivoFalhaPasso
from marcha_app.core.excecoes import (
    ExcecaoLinearizacao,
    ExcecaoNumerica,
    ExcecaoParInestabilizavel,
    FalhaPasso,
)
from marcha_app.dominio import ControladorIcpm, Secao
from marcha_app.services.servico_icpm import ServicoIcpm
from marcha_app.services.servico_rotina_marcha import RotinaMarcha
from marcha_app.tests.auxiliares import (
    configuracao_padrao,
    controlador_padrao,
    marcha_tabela,
    ponto_fixo_padrao,
)


class RiccatiTest(SimpleTestCase):
    """Tests for the discrete Riccati solution and the LQR gain."""

    def test_caso_escalar(self):
        """Test the scalar DARE against its closed form."""
        a, b, q, r = (np.array([[valor]]) for valor in (0.5, 1.0, 1.0, 1.0))
        p = ServicoIcpm.resolver_riccati(a, b, q, r)
        self.assertAlmostEqual(p[0, 0], (0.25 + np.sqrt(4.0625)) / 2, places=10)

        k = ServicoIcpm.ganho_lqr(a, b, q, r)
        self.assertAlmostEqual(k[0, 0], -0.26556, delta=1e-5)
        self.assertAlmostEqual(abs(0.5 + k[0, 0]), 0.23444, delta=1e-5)

    def test_contra_scipy(self):
        """Test the Riccati iteration agrees with scipy on random stabilizable pairs."""
        gerador = np.random.default_rng(21)
        for _ in range(3):
            a = 0.5 * gerador.normal(size=(4, 4))
            b = gerador.normal(size=(4, 2))
            q, r = np.eye(4), 0.5 * np.eye(2)

            np.testing.assert_allclose(
                ServicoIcpm.resolver_riccati(a, b, q, r), solve_discrete_are(a, b, q, r), rtol=1e-7, atol=1e-9
            )
            k = ServicoIcpm.ganho_lqr(a, b, q, r)
            self.assertLess(np.max(np.abs(np.linalg.eigvals(a + b @ k))), 1.0)

    def test_par_inestabilizavel(self):
        """Test an unstable mode out of reach of B is rejected."""
        a = np.diag([2.0, 0.5])
        b = np.array([[0.0], [1.0]])
        self.assertEqual(ServicoIcpm.posto_controlabilidade(a, b), 1)
        with self.assertRaises(ExcecaoParInestabilizavel):
            ServicoIcpm.ganho_lqr(a, b, np.eye(2), np.eye(1))

    def test_parada_absoluta(self):
        """Test one more Riccati update moves P by less than 1e-12 in the infinity norm."""
        gerador = np.random.default_rng(5)
        a = 0.5 * gerador.normal(size=(4, 4))
        b = gerador.normal(size=(4, 2))
        q, r = np.eye(4), np.eye(2)

        p = ServicoIcpm.resolver_riccati(a, b, q, r)
        ganho = -np.linalg.solve(r + b.T @ p @ b, b.T @ p @ a)
        proximo = q + a.T @ p @ a + a.T @ p @ b @ ganho
        self.assertLess(np.linalg.norm(proximo - p, np.inf), 1e-12)

    def test_posto_controlavel(self):
        """Test a chain of integrators is fully controllable."""
        a = np.array([[1.0, 1.0], [0.0, 1.0]])
        b = np.array([[0.0], [1.0]])
        self.assertEqual(ServicoIcpm.posto_controlabilidade(a, b), 2)


class ServicoIcpmTest(SimpleTestCase):
    """Tests for ServicoIcpm."""

    def setUp(self):
        """Set up test data."""
        self.configuracao = configuracao_padrao()
        self.secao = Secao(q2_estrela=np.pi / 16)

    def test_erro_secao_normaliza_angulos(self):
        """Test the section error wraps the angular components only."""
        z = np.zeros(9)
        referencia = np.zeros(9)
        z[0], referencia[0] = np.pi - 0.1, -np.pi + 0.1
        z[5], referencia[5] = 7.0, -7.0

        erro = ServicoIcpm.erro_secao(z, referencia)
        self.assertAlmostEqual(erro[0], -0.2, places=12)
        self.assertAlmostEqual(erro[5], 14.0, places=12)

    def test_estado_e_secao_inversos(self):
        """Test z -> state -> z is the identity."""
        z = np.array([0.1, -0.2, 3.0, 0.3, 1.0, -2.0, 0.5, 0.0, -5.0])
        estado = ServicoIcpm.estado_de_secao(self.secao, z)

        self.assertEqual(estado.q2, np.pi / 16)
        self.assertEqual(estado.dq2, -5.0)
        np.testing.assert_allclose(ServicoIcpm.secao_de_estado(estado), z, atol=1e-15)

    def test_realimentacao_impulso(self):
        """Test I = K e with the wrapped error."""
        z_estrela = np.zeros(9)
        z_estrela[2] = np.pi - 0.05
        k = np.zeros((4, 9))
        k[0, 2] = 2.0
        controlador = ControladorIcpm(
            secao=self.secao, z_estrela=z_estrela, a=np.eye(9), b=np.zeros((9, 4)), k=k,
            q=np.eye(9), r=np.eye(4),
        )
        z = z_estrela.copy()
        z[2] = -np.pi + 0.05
        np.testing.assert_allclose(ServicoIcpm.realimentacao_impulso(controlador, z), [0.2, 0.0, 0.0, 0.0], atol=1e-12)

    def test_linearizar_mapa_linear(self):
        """Test central differences recover the Jacobians of an affine map."""
        gerador = np.random.default_rng(8)
        a0 = gerador.normal(size=(9, 9))
        b0 = gerador.normal(size=(9, 4))
        contexto = RotinaMarcha.construir_contexto(self.configuracao, marcha_tabela())
        z_estrela = np.array([0.05, -0.1, 3.0, 0.2, 0.3, -0.4, 1.0, 0.1, -5.0])

        with patch.object(
            ServicoIcpm, 'mapa_poincare', side_effect=lambda contexto, z, impulso: a0 @ z + b0 @ impulso
        ):
            a, b = ServicoIcpm.linearizar(contexto, z_estrela)

        np.testing.assert_allclose(a, a0, atol=1e-7)
        np.testing.assert_allclose(b, b0, atol=1e-7)

    def test_linearizar_falha_persistente(self):
        """Test a map that always fails gives up after one reduced retry."""
        contexto = RotinaMarcha.construir_contexto(self.configuracao, marcha_tabela())
        falha = FalhaPasso(MotivoFalhaPasso.FALHA_INTEGRACAO)

        with patch.object(ServicoIcpm, 'mapa_poincare', side_effect=falha) as mapa:
            with self.assertRaises(ExcecaoLinearizacao):
                ServicoIcpm.linearizar(contexto, np.zeros(9))
        # 2 * (9 + 4) avaliações por tentativa, duas tentativas
        self.assertEqual(mapa.call_count, 52)

    def test_ponto_fixo(self):
        """Test the fixed point lies on the orbit with the section direction."""
        z_estrela = ponto_fixo_padrao()
        self.assertEqual(z_estrela.shape, (9,))
        self.assertLess(z_estrela[-1], 0.0)

    def test_controlador(self):
        """Test the synthesized controller shapes and closed-loop stability."""
        controlador = controlador_padrao()

        self.assertEqual(controlador.a.shape, (9, 9))
        self.assertEqual(controlador.b.shape, (9, 4))
        self.assertEqual(controlador.k.shape, (4, 9))
        np.testing.assert_array_equal(controlador.z_estrela, ponto_fixo_padrao())
        self.assertLess(controlador.raio_espectral_malha_fechada, 1.0)

    def test_linearizacao_da_marcha_padrao(self):
        """Test the open-loop map is not contracting and the pair (A, B) is controllable."""
        controlador = controlador_padrao()

        self.assertEqual(ServicoIcpm.posto_controlabilidade(controlador.a, controlador.b), 9)
        # autovalor dominante sobre o círculo unitário
        self.assertGreater(controlador.raio_espectral_malha_aberta, 1.0 - 1e-5)

    def test_par_nao_controlavel_rejeitado(self):
        """Test synthesis stops with a numerical error on an uncontrollable pair."""
        contexto = RotinaMarcha.construir_contexto(self.configuracao, marcha_tabela())
        a = np.eye(9)
        b = np.zeros((9, 4))
        b[0, 0] = 1.0

        with patch.object(ServicoIcpm, 'encontrar_ponto_fixo', return_value=np.zeros(9)), \
                patch.object(ServicoIcpm, 'linearizar', return_value=(a, b)), \
                patch.object(ServicoIcpm, 'ganho_lqr') as ganho_lqr:
            with self.assertRaises(ExcecaoParInestabilizavel) as contexto_erro:
                ServicoIcpm.sintetizar_controlador(
                    None, contexto, self.configuracao.peso_q, self.configuracao.peso_r
                )

        self.assertIsInstance(contexto_erro.exception, ExcecaoNumerica)
        self.assertIn("posto 1", str(contexto_erro.exception))
        ganho_lqr.assert_not_called()

    def test_exportar_matrizes(self):
        """Test the exported matrices reload exactly."""
        controlador = controlador_padrao()
        with tempfile.TemporaryDirectory() as temporario:
            diretorio = Path(temporario) / 'matrizes'
            ServicoIcpm.exportar_matrizes(controlador, diretorio)

            np.testing.assert_array_equal(np.loadtxt(diretorio / ARQUIVOS_MATRIZES['z_estrela']), controlador.z_estrela)
            np.testing.assert_array_equal(np.loadtxt(diretorio / ARQUIVOS_MATRIZES['A']), controlador.a)
            np.testing.assert_array_equal(np.loadtxt(diretorio / ARQUIVOS_MATRIZES['B']), controlador.b)
            np.testing.assert_array_equal(np.loadtxt(diretorio / ARQUIVOS_MATRIZES['K']), controlador.k)
