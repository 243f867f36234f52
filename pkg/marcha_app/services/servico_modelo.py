"""
Serviço do modelo - Dinâmica de corpo rígido do bípede planar de n elos.

A matriz de massa e as forças de viés são compostas numericamente a partir do
Lagrangiano em ângulos absolutos (D_ik = B_ik cos(theta_i - theta_k) + J_i delta_ik)
e levadas às coordenadas generalizadas q = (q1, q2) pela transformação linear theta = T q.
"""
import logging
from typing import List, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from marcha_app.core.excecoes import ExcecaoNumerica
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.core.validadores import validar_dimensao
from marcha_app.dominio import (
    ParametrosBipede,
    Estado,
    EstadoAbsoluto,
    VerificacaoInvariante,
)

logger = logging.getLogger(__name__)

# Limites da bateria de invariantes do modelo
LIMITE_SIMETRIA = 1e-12
LIMITE_PARIDADE = 1e-12
LIMITE_DIFERENCAS_FINITAS = 1e-6
LIMITE_REDUCAO_PE_FIXO = 1e-10
LIMITE_DERIVA_ENERGIA = 1e-6
PASSO_DIFERENCAS_FINITAS = 1e-6
DURACAO_TESTE_PASSIVO = 1.0


class ServicoModelo:
    """Serviço para a dinâmica da fase de balanço e do modelo estendido."""

    @staticmethod
    def absoluto_para_generalizado(parametros: ParametrosBipede, estado: EstadoAbsoluto) -> Estado:
        """
        Converte ângulos absolutos em coordenadas generalizadas.

        q1_j = theta_{j+1} - theta_j e q2 = theta_1; as velocidades seguem as mesmas relações.

        Raises:
            ExcecaoDadosInvalidos: Se as dimensões não conferem com n
        """
        theta = validar_dimensao(estado.theta, parametros.n, "theta")
        dtheta = validar_dimensao(estado.dtheta, parametros.n, "dtheta")
        return Estado(q1=np.diff(theta), q2=theta[0], dq1=np.diff(dtheta), dq2=dtheta[0])

    @staticmethod
    def generalizado_para_absoluto(parametros: ParametrosBipede, estado: Estado) -> EstadoAbsoluto:
        """
        Converte coordenadas generalizadas em ângulos absolutos (soma acumulada).

        Raises:
            ExcecaoDadosInvalidos: Se as dimensões não conferem com n
        """
        q = validar_dimensao(estado.q, parametros.n, "q")
        dq = validar_dimensao(estado.dq, parametros.n, "dq")
        transformacao = parametros.matriz_transformacao
        return EstadoAbsoluto(theta=transformacao @ q, dtheta=transformacao @ dq)

    @staticmethod
    def _matriz_absoluta(parametros: ParametrosBipede, theta: np.ndarray) -> np.ndarray:
        """Matriz de massa em ângulos absolutos com o pé de apoio fixo."""
        diferencas = theta[:, None] - theta[None, :]
        return parametros.matriz_inercia_cruzada * np.cos(diferencas) + np.diag(parametros.inercias)

    @staticmethod
    def matriz_massa(parametros: ParametrosBipede, q: np.ndarray) -> np.ndarray:
        """
        Matriz de massa M(q), simétrica e positiva definida.

        Args:
            parametros: Parâmetros do bípede
            q: Coordenadas generalizadas (q1, q2)

        Returns:
            Matriz n x n
        """
        transformacao = parametros.matriz_transformacao
        theta = transformacao @ q
        return transformacao.T @ ServicoModelo._matriz_absoluta(parametros, theta) @ transformacao

    @staticmethod
    def particionar_matriz_massa(matriz: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        """Retorna (M11, M12, M22) com M12 como vetor coluna achatado."""
        return matriz[:-1, :-1], matriz[:-1, -1], float(matriz[-1, -1])

    @staticmethod
    def gradiente_potencial(parametros: ParametrosBipede, q: np.ndarray) -> np.ndarray:
        """dV/dq na ordenação de q."""
        transformacao = parametros.matriz_transformacao
        theta = transformacao @ q
        return transformacao.T @ (-parametros.gravidade * parametros.momentos_massa * np.sin(theta))

    @staticmethod
    def forcas_bias(parametros: ParametrosBipede, q: np.ndarray, dq: np.ndarray) -> np.ndarray:
        """
        Vetor h(q, dq) de forças de Coriolis, centrífugas e gravitacionais.

        Em ângulos absolutos o termo de velocidade é sum_k B_ik sin(theta_i - theta_k) dtheta_k^2.
        """
        transformacao = parametros.matriz_transformacao
        theta = transformacao @ q
        dtheta = transformacao @ dq
        diferencas = theta[:, None] - theta[None, :]
        centrifugas = (parametros.matriz_inercia_cruzada * np.sin(diferencas)) @ (dtheta ** 2)
        gravidade = -parametros.gravidade * parametros.momentos_massa * np.sin(theta)
        return transformacao.T @ (centrifugas + gravidade)

    @staticmethod
    def energia_potencial(parametros: ParametrosBipede, q: np.ndarray) -> float:
        """Energia potencial com o pé de apoio na origem (J)."""
        theta = parametros.matriz_transformacao @ q
        return float(parametros.gravidade * np.dot(parametros.momentos_massa, np.cos(theta)))

    @staticmethod
    def energia_cinetica(parametros: ParametrosBipede, q: np.ndarray, dq: np.ndarray) -> float:
        """Energia cinética 1/2 dq^T M dq (J)."""
        return float(0.5 * dq @ ServicoModelo.matriz_massa(parametros, q) @ dq)

    @staticmethod
    def energia_total(parametros: ParametrosBipede, estado: Estado) -> float:
        """Energia mecânica total (J)."""
        return (
            ServicoModelo.energia_cinetica(parametros, estado.q, estado.dq)
            + ServicoModelo.energia_potencial(parametros, estado.q)
        )

    @staticmethod
    def aceleracoes(
        parametros: ParametrosBipede,
        q: np.ndarray,
        dq: np.ndarray,
        u: np.ndarray
    ) -> np.ndarray:
        """
        Resolve M ddq + h = (u, 0).

        Raises:
            ExcecaoNumerica: Se a matriz de massa for singular
        """
        matriz = ServicoModelo.matriz_massa(parametros, q)
        forcas = np.append(u, 0.0) - ServicoModelo.forcas_bias(parametros, q, dq)
        try:
            return np.linalg.solve(matriz, forcas)
        except np.linalg.LinAlgError as e:
            registrar_evento("error", "Matriz de massa singular", logger, q=q)
            raise ExcecaoNumerica(f"Matriz de massa singular: {e}") from e

    @staticmethod
    def dinamica_balanco(parametros: ParametrosBipede, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """
        Campo vetorial da fase de balanço: dx = (dq, ddq).

        Args:
            parametros: Parâmetros do bípede
            x: Estado como vetor (q1, q2, dq1, dq2)
            u: Torques nas juntas atuadas, dimensão n-1

        Returns:
            Derivada do estado
        """
        n = parametros.n
        u = validar_dimensao(u, n - 1, "u")
        q, dq = x[:n], x[n:]
        return np.concatenate([dq, ServicoModelo.aceleracoes(parametros, q, dq, u)])

    @staticmethod
    def _separar_estendido(parametros: ParametrosBipede, vetor: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Separa q e s; vetores de tamanho n assumem o pé de apoio na origem."""
        n = parametros.n
        vetor = np.asarray(vetor, dtype=float)
        if vetor.size == n:
            return vetor, np.zeros(2)
        validar_dimensao(vetor, n + 2, "q_e")
        return vetor[:n], vetor[n:]

    @staticmethod
    def matriz_massa_estendida(parametros: ParametrosBipede, q_e: np.ndarray) -> np.ndarray:
        """
        Matriz de massa do sistema estendido com o pé de apoio livre, (n+2) x (n+2).

        O bloco de translação vale a massa total na diagonal; o bloco q-q coincide com M(q).
        """
        n = parametros.n
        q, _ = ServicoModelo._separar_estendido(parametros, q_e)
        transformacao = parametros.matriz_transformacao
        theta = transformacao @ q
        acoplamento = parametros.momentos_massa[:, None] * np.column_stack([-np.cos(theta), -np.sin(theta)])

        estendida = np.zeros((n + 2, n + 2))
        estendida[:n, :n] = ServicoModelo.matriz_massa(parametros, q)
        estendida[:n, n:] = transformacao.T @ acoplamento
        estendida[n:, :n] = estendida[:n, n:].T
        estendida[n:, n:] = parametros.massa_total * np.eye(2)
        return estendida

    @staticmethod
    def posicao_pe_balanco(parametros: ParametrosBipede, q_e: np.ndarray) -> np.ndarray:
        """
        Posição cartesiana do pé de balanço, gamma = s + sum ell_j (-sin theta_j, cos theta_j).

        Args:
            parametros: Parâmetros do bípede
            q_e: q (pé de apoio na origem) ou q_e = (q, s_x, s_y)
        """
        q, s = ServicoModelo._separar_estendido(parametros, q_e)
        theta = parametros.matriz_transformacao @ q
        comprimentos = parametros.comprimentos_pe
        return s + np.array([-np.dot(comprimentos, np.sin(theta)), np.dot(comprimentos, np.cos(theta))])

    @staticmethod
    def jacobiano_pe_balanco(parametros: ParametrosBipede, q_e: np.ndarray) -> np.ndarray:
        """Gamma = d gamma / d q_e, matriz 2 x (n+2)."""
        n = parametros.n
        q, _ = ServicoModelo._separar_estendido(parametros, q_e)
        transformacao = parametros.matriz_transformacao
        theta = transformacao @ q
        comprimentos = parametros.comprimentos_pe
        jacobiano_theta = np.vstack([-comprimentos * np.cos(theta), -comprimentos * np.sin(theta)])

        jacobiano = np.zeros((2, n + 2))
        jacobiano[:, :n] = jacobiano_theta @ transformacao
        jacobiano[:, n:] = np.eye(2)
        return jacobiano

    @staticmethod
    def velocidade_pe_balanco(parametros: ParametrosBipede, q_e: np.ndarray, dq_e: np.ndarray) -> np.ndarray:
        """Velocidade do pé de balanço, Gamma dq_e (pé de apoio parado se dq_e tem tamanho n)."""
        _, ds = ServicoModelo._separar_estendido(parametros, dq_e)
        dq = np.asarray(dq_e, dtype=float)[:parametros.n]
        jacobiano = ServicoModelo.jacobiano_pe_balanco(parametros, q_e)
        return jacobiano @ np.concatenate([dq, ds])

    @staticmethod
    def verificar_invariantes(
        parametros: ParametrosBipede,
        semente: int = 0,
        amostras: int = 1000
    ) -> List[VerificacaoInvariante]:
        """
        Executa a bateria de invariantes do modelo.

        Args:
            parametros: Parâmetros do bípede
            semente: Semente do gerador de configurações aleatórias
            amostras: Número de configurações aleatórias

        Returns:
            Lista de verificações nomeadas com valor medido e limite
        """
        gerador = np.random.default_rng(semente)
        n = parametros.n
        configuracoes = gerador.uniform(-np.pi, np.pi, size=(amostras, n))

        erro_simetria = 0.0
        autovalor_minimo = np.inf
        erro_paridade_m = 0.0
        erro_paridade_v = 0.0
        erro_reducao = 0.0
        for q in configuracoes:
            matriz = ServicoModelo.matriz_massa(parametros, q)
            erro_simetria = max(erro_simetria, float(np.max(np.abs(matriz - matriz.T))))
            autovalor_minimo = min(autovalor_minimo, float(np.min(np.linalg.eigvalsh(matriz))))
            erro_paridade_m = max(
                erro_paridade_m,
                float(np.max(np.abs(matriz - ServicoModelo.matriz_massa(parametros, -q))))
            )
            erro_paridade_v = max(
                erro_paridade_v,
                abs(ServicoModelo.energia_potencial(parametros, q) - ServicoModelo.energia_potencial(parametros, -q))
            )
            estendida = ServicoModelo.matriz_massa_estendida(parametros, np.append(q, [0.0, 0.0]))
            erro_reducao = max(erro_reducao, float(np.max(np.abs(estendida[:n, :n] - matriz))))

        amostras_fd = configuracoes[:min(amostras, 50)]
        erro_gradiente = max(
            float(np.max(np.abs(
                ServicoModelo.forcas_bias(parametros, q, np.zeros(n))
                - ServicoModelo._gradiente_numerico_potencial(parametros, q)
            )))
            for q in amostras_fd
        )
        erro_jacobiano = max(
            ServicoModelo._erro_jacobiano_pe(parametros, np.append(q, gerador.normal(size=2)))
            for q in amostras_fd
        )
        deriva_energia = ServicoModelo._deriva_energia_passiva(parametros, gerador)

        verificacoes = [
            VerificacaoInvariante("simetria de M", erro_simetria <= LIMITE_SIMETRIA, erro_simetria, LIMITE_SIMETRIA),
            VerificacaoInvariante("M positiva definida", autovalor_minimo > 0.0, autovalor_minimo, 0.0),
            VerificacaoInvariante("M(q) = M(-q)", erro_paridade_m <= LIMITE_PARIDADE, erro_paridade_m, LIMITE_PARIDADE),
            VerificacaoInvariante("V(q) = V(-q)", erro_paridade_v <= LIMITE_PARIDADE, erro_paridade_v, LIMITE_PARIDADE),
            VerificacaoInvariante(
                "h(q, 0) = dV/dq", erro_gradiente <= LIMITE_DIFERENCAS_FINITAS,
                erro_gradiente, LIMITE_DIFERENCAS_FINITAS
            ),
            VerificacaoInvariante(
                "jacobiano do pé", erro_jacobiano <= LIMITE_DIFERENCAS_FINITAS,
                erro_jacobiano, LIMITE_DIFERENCAS_FINITAS
            ),
            VerificacaoInvariante(
                "redução com pé fixo", erro_reducao <= LIMITE_REDUCAO_PE_FIXO,
                erro_reducao, LIMITE_REDUCAO_PE_FIXO
            ),
            VerificacaoInvariante(
                "deriva de energia passiva", deriva_energia <= LIMITE_DERIVA_ENERGIA,
                deriva_energia, LIMITE_DERIVA_ENERGIA
            ),
        ]
        falhas = [verificacao.nome for verificacao in verificacoes if not verificacao.aprovado]
        registrar_evento(
            "warning" if falhas else "info",
            f"Invariantes do modelo: {len(verificacoes) - len(falhas)}/{len(verificacoes)} aprovados",
            logger,
            falhas=falhas
        )
        return verificacoes

    @staticmethod
    def _gradiente_numerico_potencial(parametros: ParametrosBipede, q: np.ndarray) -> np.ndarray:
        """Diferenças centrais de V."""
        gradiente = np.zeros_like(q)
        for indice in range(q.size):
            passo = np.zeros_like(q)
            passo[indice] = PASSO_DIFERENCAS_FINITAS
            gradiente[indice] = (
                ServicoModelo.energia_potencial(parametros, q + passo)
                - ServicoModelo.energia_potencial(parametros, q - passo)
            ) / (2.0 * PASSO_DIFERENCAS_FINITAS)
        return gradiente

    @staticmethod
    def _erro_jacobiano_pe(parametros: ParametrosBipede, q_e: np.ndarray) -> float:
        """Máximo erro absoluto entre Gamma e diferenças centrais de gamma."""
        analitico = ServicoModelo.jacobiano_pe_balanco(parametros, q_e)
        numerico = np.zeros_like(analitico)
        for indice in range(q_e.size):
            passo = np.zeros_like(q_e)
            passo[indice] = PASSO_DIFERENCAS_FINITAS
            numerico[:, indice] = (
                ServicoModelo.posicao_pe_balanco(parametros, q_e + passo)
                - ServicoModelo.posicao_pe_balanco(parametros, q_e - passo)
            ) / (2.0 * PASSO_DIFERENCAS_FINITAS)
        return float(np.max(np.abs(analitico - numerico)))

    @staticmethod
    def _deriva_energia_passiva(parametros: ParametrosBipede, gerador: np.random.Generator) -> float:
        """
        Simula a cadeia sem torques por um segundo e retorna |E(t) - E(0)| / |E(0)| máximo.

        Raises:
            ExcecaoNumerica: Se a integração falhar
        """
        n = parametros.n
        x0 = np.concatenate([gerador.uniform(-0.2, 0.2, n), gerador.uniform(-0.5, 0.5, n)])
        sem_torque = np.zeros(n - 1)
        solucao = solve_ivp(
            lambda t, x: ServicoModelo.dinamica_balanco(parametros, x, sem_torque),
            (0.0, DURACAO_TESTE_PASSIVO),
            x0,
            method='DOP853',
            rtol=1e-10,
            atol=1e-12,
        )
        if not solucao.success:
            raise ExcecaoNumerica(f"Falha na simulação passiva: {solucao.message}")
        energias = np.array([
            ServicoModelo.energia_total(parametros, Estado.de_vetor(x)) for x in solucao.y.T
        ])
        return float(np.max(np.abs(energias - energias[0])) / abs(energias[0]))

