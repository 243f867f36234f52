"""
Tests for the rigid-body model.
"""
import numpy as np
from django.test import SimpleTestCase
from scipy.linalg import null_space

from marcha_app.core.excecoes import ExcecaoDadosInvalidos
from marcha_app.dominio import Estado, EstadoAbsoluto, ParametrosBipede
from marcha_app.services.servico_modelo import ServicoModelo
from marcha_app.tests.auxiliares import configuracao_padrao


class ServicoModeloTest(SimpleTestCase):
    """Tests for ServicoModelo."""

    def setUp(self):
        """Set up test data."""
        self.bipede = configuracao_padrao().bipede
        self.gerador = np.random.default_rng(11)

    def test_bateria_de_invariantes(self):
        """Test the invariant suite passes for the five-link biped."""
        verificacoes = ServicoModelo.verificar_invariantes(self.bipede, semente=3, amostras=200)
        self.assertEqual(len(verificacoes), 8)
        for verificacao in verificacoes:
            self.assertTrue(verificacao.aprovado, f"{verificacao.nome}: {verificacao.valor}")

    def test_matriz_massa_simetrica_positiva(self):
        """Test M(q) is symmetric and positive definite."""
        for q in self.gerador.uniform(-np.pi, np.pi, size=(20, 5)):
            matriz = ServicoModelo.matriz_massa(self.bipede, q)
            np.testing.assert_allclose(matriz, matriz.T, atol=1e-14)
            self.assertGreater(np.min(np.linalg.eigvalsh(matriz)), 0.0)

    def test_conversao_de_coordenadas(self):
        """Test absolute and generalized coordinates are inverse maps."""
        absoluto = EstadoAbsoluto(theta=self.gerador.normal(size=5), dtheta=self.gerador.normal(size=5))
        estado = ServicoModelo.absoluto_para_generalizado(self.bipede, absoluto)
        de_volta = ServicoModelo.generalizado_para_absoluto(self.bipede, estado)

        self.assertEqual(estado.q2, absoluto.theta[0])
        np.testing.assert_allclose(de_volta.theta, absoluto.theta, atol=1e-14)
        np.testing.assert_allclose(de_volta.dtheta, absoluto.dtheta, atol=1e-14)

    def test_conversao_dimensao_errada(self):
        """Test wrong-sized angle vectors are rejected."""
        with self.assertRaises(ExcecaoDadosInvalidos):
            ServicoModelo.absoluto_para_generalizado(
                self.bipede, EstadoAbsoluto(theta=np.zeros(4), dtheta=np.zeros(4))
            )

    def test_pendulo_de_um_elo(self):
        """Test a single link reduces to the inverted pendulum."""
        pendulo = ParametrosBipede(
            n=1, comprimentos=[1.0], distancias_com=[0.4], massas=[2.0], inercias=[0.05]
        )
        for angulo in (-0.7, 0.2, 1.3):
            aceleracao = ServicoModelo.aceleracoes(pendulo, np.array([angulo]), np.array([0.3]), np.zeros(0))
            # theta medido da vertical para cima: a gravidade afasta o elo da vertical
            esperado = 2.0 * 9.81 * 0.4 * np.sin(angulo) / (2.0 * 0.4 ** 2 + 0.05)
            self.assertAlmostEqual(aceleracao[0], esperado, places=12)

    def test_forcas_bias_sem_velocidade(self):
        """Test h(q, 0) equals the gradient of V."""
        for q in self.gerador.uniform(-np.pi, np.pi, size=(10, 5)):
            np.testing.assert_allclose(
                ServicoModelo.forcas_bias(self.bipede, q, np.zeros(5)),
                ServicoModelo._gradiente_numerico_potencial(self.bipede, q),
                atol=1e-6,
            )

    def test_massa_estendida(self):
        """Test the extended mass matrix blocks."""
        q = self.gerador.uniform(-np.pi, np.pi, 5)
        estendida = ServicoModelo.matriz_massa_estendida(self.bipede, np.append(q, [0.3, -0.2]))

        self.assertEqual(estendida.shape, (7, 7))
        np.testing.assert_allclose(estendida[:5, :5], ServicoModelo.matriz_massa(self.bipede, q), atol=1e-14)
        np.testing.assert_allclose(estendida[5:, 5:], 2.25 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(estendida, estendida.T, atol=1e-14)
        self.assertGreater(np.min(np.linalg.eigvalsh(estendida)), 0.0)

    def test_pe_de_balanco_na_postura_vertical(self):
        """Test the swing foot meets the stance foot in the upright posture."""
        # Phi(0) = (0, 0, pi, 0): pernas sobrepostas e tronco vertical
        posicao = ServicoModelo.posicao_pe_balanco(self.bipede, np.array([0.0, 0.0, np.pi, 0.0, 0.0]))
        np.testing.assert_allclose(posicao, [0.0, 0.0], atol=1e-14)

    def test_pe_de_balanco_translada_com_apoio(self):
        """Test gamma shifts with the stance-foot position."""
        q = self.gerador.uniform(-1.0, 1.0, 5)
        deslocada = ServicoModelo.posicao_pe_balanco(self.bipede, np.append(q, [0.7, -0.1]))
        np.testing.assert_allclose(
            deslocada, ServicoModelo.posicao_pe_balanco(self.bipede, q) + [0.7, -0.1], atol=1e-14
        )

    def test_jacobiano_pe_balanco(self):
        """Test Gamma against central differences."""
        for q_e in self.gerador.normal(size=(10, 7)):
            self.assertLess(ServicoModelo._erro_jacobiano_pe(self.bipede, q_e), 1e-6)

    def test_velocidade_pe_no_nucleo(self):
        """Test velocities in the kernel of Gamma leave the foot at rest."""
        q = self.gerador.uniform(-1.0, 1.0, 5)
        jacobiano = ServicoModelo.jacobiano_pe_balanco(self.bipede, q)[:, :5]
        dq = null_space(jacobiano)[:, 0]
        np.testing.assert_allclose(ServicoModelo.velocidade_pe_balanco(self.bipede, q, dq), 0.0, atol=1e-12)

    def test_energia_cinetica(self):
        """Test T = 1/2 dq^T M dq and the total energy split."""
        estado = Estado(q1=self.gerador.normal(size=4), q2=0.2, dq1=self.gerador.normal(size=4), dq2=-1.0)
        matriz = ServicoModelo.matriz_massa(self.bipede, estado.q)
        cinetica = ServicoModelo.energia_cinetica(self.bipede, estado.q, estado.dq)

        self.assertAlmostEqual(cinetica, 0.5 * estado.dq @ matriz @ estado.dq, places=12)
        self.assertAlmostEqual(
            ServicoModelo.energia_total(self.bipede, estado),
            cinetica + ServicoModelo.energia_potencial(self.bipede, estado.q),
            places=12,
        )

    def test_dinamica_balanco_torque_errado(self):
        """Test the swing vector field rejects a wrong torque size."""
        with self.assertRaises(ExcecaoDadosInvalidos):
            ServicoModelo.dinamica_balanco(self.bipede, np.zeros(10), np.zeros(5))
