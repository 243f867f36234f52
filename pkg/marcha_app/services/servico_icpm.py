"""
Serviço ICPM - Mapa de Poincaré com impulso, ponto fixo, linearização e LQR discreto.

Os estados na seção são z = (q1, dq1, dq2) com q2 = q2* implícito; o erro
e = z - z* é normalizado nas componentes angulares.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from marcha_app.core.constantes import (
    ARQUIVOS_MATRIZES,
    FORMATO_MATRIZ,
    LIMITE_DIVERGENCIA_RICCATI,
    MAXIMO_ITERACOES_RICCATI,
    ModoImpulso,
    PISO_ARREDONDAMENTO_RICCATI,
    REDUCAO_PERTURBACAO_LINEARIZACAO,
    TOLERANCIA_RICCATI,
)
from marcha_app.core.excecoes import (
    ExcecaoLinearizacao,
    ExcecaoOrbitaInconsistente,
    ExcecaoParInestabilizavel,
    FalhaPasso,
)
from marcha_app.core.utilitarios import normalizar_angulo, registrar_evento, salvar_matriz
from marcha_app.core.validadores import validar_dimensao
from marcha_app.dominio import (
    ContextoMarcha,
    ControladorIcpm,
    Estado,
    Orbita,
    Secao,
)
from marcha_app.services.servico_dinamica_zero import ServicoDinamicaZero
from marcha_app.services.servico_passo import ServicoPasso

logger = logging.getLogger(__name__)

TOLERANCIA_PONTO_FIXO = 1e-6


def _avaliar_mapa(argumentos: tuple) -> Optional[np.ndarray]:
    """Avaliação isolada do mapa para o pool de processos; None sinaliza falha de passo."""
    contexto, z, impulso = argumentos
    try:
        return ServicoIcpm.mapa_poincare(contexto, z, impulso)
    except FalhaPasso:
        return None


class ServicoIcpm:
    """Serviço para o mapa de Poincaré controlado por impulsos."""

    @staticmethod
    def estado_de_secao(secao: Secao, z: np.ndarray) -> Estado:
        """Estado completo a partir de z = (q1, dq1, dq2) na seção."""
        z = np.asarray(z, dtype=float)
        n = (z.size + 1) // 2
        return Estado(q1=z[:n - 1], q2=secao.q2_estrela, dq1=z[n - 1:2 * n - 2], dq2=z[-1])

    @staticmethod
    def secao_de_estado(estado: Estado) -> np.ndarray:
        """z = (q1, dq1, dq2) com os ângulos normalizados."""
        return np.concatenate([normalizar_angulo(estado.q1), estado.dq1, [estado.dq2]])

    @staticmethod
    def erro_secao(z: np.ndarray, referencia: np.ndarray) -> np.ndarray:
        """z - referencia com as n-1 componentes angulares normalizadas."""
        erro = np.asarray(z, dtype=float) - np.asarray(referencia, dtype=float)
        n = (erro.size + 1) // 2
        erro[:n - 1] = normalizar_angulo(erro[:n - 1])
        return erro

    @staticmethod
    def mapa_poincare(contexto: ContextoMarcha, z: np.ndarray, impulso: np.ndarray) -> np.ndarray:
        """
        Mapa de Poincaré com impulso ideal aplicado na seção.

        Args:
            contexto: Modelo, marcha, ganhos, seção e tolerâncias
            z: Estado na seção, dimensão 2n-1
            impulso: Impulso nas juntas atuadas, dimensão n-1

        Returns:
            Estado na próxima travessia da seção

        Raises:
            FalhaPasso: Se o passo não puder ser completado
        """
        n = contexto.bipede.n
        z = validar_dimensao(z, 2 * n - 1, "z")
        estado = ServicoIcpm.estado_de_secao(contexto.secao, z)
        resultado = ServicoPasso.percorrer_passo(contexto, estado, impulso, ModoImpulso.IDEAL)
        return ServicoIcpm.secao_de_estado(resultado.estado_final)

    @staticmethod
    def encontrar_ponto_fixo(orbita: Orbita, contexto: ContextoMarcha) -> np.ndarray:
        """
        Ponto fixo z* da órbita alvo na seção.

        Raises:
            ExcecaoOrbitaInconsistente: Se ||p(z*, 0) - z*|| >= 1e-6 ou o passo falhar
        """
        q2_estrela = contexto.secao.q2_estrela
        dq2_estrela = ServicoDinamicaZero.velocidade_orbita(orbita, q2_estrela)
        estado = ServicoDinamicaZero.levantar_para_variedade(orbita.marcha, q2_estrela, dq2_estrela)
        z_estrela = ServicoIcpm.secao_de_estado(estado)

        try:
            imagem = ServicoIcpm.mapa_poincare(contexto, z_estrela, np.zeros(contexto.bipede.n - 1))
        except FalhaPasso as e:
            registrar_evento("error", "Passo falhou a partir de z*", logger, motivo=e.motivo.value)
            raise ExcecaoOrbitaInconsistente(f"Órbita e seção inconsistentes: {e}") from e

        residuo = float(np.linalg.norm(ServicoIcpm.erro_secao(imagem, z_estrela)))
        registrar_evento("info", "Ponto fixo verificado", logger, residuo=residuo, z_estrela=z_estrela)
        if residuo >= TOLERANCIA_PONTO_FIXO:
            raise ExcecaoOrbitaInconsistente(
                f"Órbita e seção inconsistentes: resíduo do ponto fixo {residuo:.3e}"
            )
        return z_estrela

    @staticmethod
    def _diferencas_centrais(
        contexto: ContextoMarcha,
        z_estrela: np.ndarray,
        delta_z: float,
        delta_i: float,
        processos: int
    ) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        n = contexto.bipede.n
        dimensao, entradas = 2 * n - 1, n - 1
        sem_impulso = np.zeros(entradas)

        tarefas = []
        for indice in range(dimensao):
            passo = np.zeros(dimensao)
            passo[indice] = delta_z
            tarefas += [(contexto, z_estrela + passo, sem_impulso), (contexto, z_estrela - passo, sem_impulso)]
        for indice in range(entradas):
            passo = np.zeros(entradas)
            passo[indice] = delta_i
            tarefas += [(contexto, z_estrela, passo), (contexto, z_estrela, -passo)]

        if processos > 1:
            with ProcessPoolExecutor(max_workers=processos) as executor:
                imagens = list(executor.map(_avaliar_mapa, tarefas))
        else:
            imagens = [_avaliar_mapa(tarefa) for tarefa in tarefas]
        if any(imagem is None for imagem in imagens):
            return None

        colunas = [
            ServicoIcpm.erro_secao(imagens[2 * indice], imagens[2 * indice + 1])
            for indice in range(dimensao + entradas)
        ]
        a = np.column_stack(colunas[:dimensao]) / (2.0 * delta_z)
        b = np.column_stack(colunas[dimensao:]) / (2.0 * delta_i)
        return a, b

    @staticmethod
    def linearizar(
        contexto: ContextoMarcha,
        z_estrela: np.ndarray,
        delta_z: float = 1e-6,
        delta_i: float = 1e-6,
        processos: int = 1
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Jacobianos A = dp/dz e B = dp/dI no ponto fixo por diferenças centrais.

        Se alguma avaliação perturbada falhar, as perturbações são reduzidas uma vez.

        Args:
            contexto: Modelo, marcha, ganhos, seção e tolerâncias
            z_estrela: Ponto fixo
            delta_z: Perturbação de estado
            delta_i: Perturbação de impulso
            processos: Processos para avaliar os mapas em paralelo

        Returns:
            (A, B)

        Raises:
            ExcecaoLinearizacao: Se a avaliação falhar mesmo com perturbações reduzidas
        """
        for tentativa in range(2):
            jacobianos = ServicoIcpm._diferencas_centrais(contexto, z_estrela, delta_z, delta_i, processos)
            if jacobianos is not None:
                registrar_evento(
                    "info", "Mapa linearizado", logger, delta_z=delta_z, delta_i=delta_i, processos=processos
                )
                return jacobianos
            registrar_evento("warning", "Avaliação perturbada falhou; reduzindo perturbação", logger, tentativa=tentativa)
            delta_z *= REDUCAO_PERTURBACAO_LINEARIZACAO
            delta_i *= REDUCAO_PERTURBACAO_LINEARIZACAO
        raise ExcecaoLinearizacao("Falha de passo nas avaliações perturbadas do mapa de Poincaré")

    @staticmethod
    def posto_controlabilidade(a: np.ndarray, b: np.ndarray) -> int:
        """Posto de [B, AB, ..., A^(m-1) B]."""
        blocos = [b]
        for _ in range(a.shape[0] - 1):
            blocos.append(a @ blocos[-1])
        return int(np.linalg.matrix_rank(np.hstack(blocos)))

    @staticmethod
    def resolver_riccati(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
        """
        Solução P da equação algébrica de Riccati discreta por iteração de ponto fixo a partir de P0 = Q.

        Raises:
            ExcecaoParInestabilizavel: Se a recursão divergir ou não convergir
        """
        p = np.array(q, dtype=float)
        for _ in range(MAXIMO_ITERACOES_RICCATI):
            s = r + b.T @ p @ b
            ganho = -np.linalg.solve(s, b.T @ p @ a)
            proximo = q + a.T @ p @ a + a.T @ p @ b @ ganho
            proximo = 0.5 * (proximo + proximo.T)
            if not np.all(np.isfinite(proximo)) or np.max(np.abs(proximo)) > LIMITE_DIVERGENCIA_RICCATI:
                registrar_evento("error", "Recursão de Riccati divergiu", logger)
                raise ExcecaoParInestabilizavel("Par (A, B) não estabilizável: recursão de Riccati divergiu")
            variacao = np.linalg.norm(proximo - p, np.inf)
            p = proximo
            # ||P_k+1 - P_k||_inf < 1e-12, ou o piso de arredondamento quando ||P|| é grande
            piso = PISO_ARREDONDAMENTO_RICCATI * np.finfo(float).eps * np.linalg.norm(p, np.inf)
            if variacao < max(TOLERANCIA_RICCATI, piso):
                return p
        raise ExcecaoParInestabilizavel(
            f"Par (A, B) não estabilizável: Riccati não convergiu em {MAXIMO_ITERACOES_RICCATI} iterações"
        )

    @staticmethod
    def ganho_lqr(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
        """
        Ganho K = -(R + B^T P B)^-1 B^T P A da realimentação I = K e.

        Raises:
            ExcecaoParInestabilizavel: Se a malha fechada não for estável
        """
        p = ServicoIcpm.resolver_riccati(a, b, q, r)
        k = -np.linalg.solve(r + b.T @ p @ b, b.T @ p @ a)
        raio = float(np.max(np.abs(np.linalg.eigvals(a + b @ k))))
        if raio >= 1.0:
            raise ExcecaoParInestabilizavel(f"Malha fechada instável: raio espectral {raio:.6f}")
        return k

    @staticmethod
    def realimentacao_impulso(controlador: ControladorIcpm, z: np.ndarray) -> np.ndarray:
        """I = K e com e = z - z* normalizado."""
        return controlador.k @ ServicoIcpm.erro_secao(z, controlador.z_estrela)

    @staticmethod
    def sintetizar_controlador(
        orbita: Orbita,
        contexto: ContextoMarcha,
        peso_q: np.ndarray,
        peso_r: np.ndarray,
        delta_z: float = 1e-6,
        delta_i: float = 1e-6,
        processos: int = 1
    ) -> ControladorIcpm:
        """
        Ponto fixo, linearização e ganho LQR para a seção do contexto.

        Raises:
            ExcecaoOrbitaInconsistente: Ponto fixo não verificado
            ExcecaoLinearizacao: Linearização falhou
            ExcecaoParInestabilizavel: Par (A, B) não controlável ou não estabilizável
        """
        # Passo 1: Ponto fixo
        z_estrela = ServicoIcpm.encontrar_ponto_fixo(orbita, contexto)

        # Passo 2: Linearização
        a, b = ServicoIcpm.linearizar(contexto, z_estrela, delta_z, delta_i, processos)
        posto = ServicoIcpm.posto_controlabilidade(a, b)
        if posto < a.shape[0]:
            registrar_evento("error", f"Par (A, B) não controlável: posto {posto}", logger)
            raise ExcecaoParInestabilizavel(f"Par (A, B) não controlável: posto {posto} < {a.shape[0]}")

        # Passo 3: LQR
        k = ServicoIcpm.ganho_lqr(a, b, peso_q, peso_r)
        controlador = ControladorIcpm(
            secao=contexto.secao, z_estrela=z_estrela, a=a, b=b, k=k, q=peso_q, r=peso_r
        )
        registrar_evento(
            "info",
            "Controlador ICPM sintetizado",
            logger,
            posto=posto,
            raio_malha_aberta=controlador.raio_espectral_malha_aberta,
            raio_malha_fechada=controlador.raio_espectral_malha_fechada
        )
        return controlador

    @staticmethod
    def exportar_matrizes(controlador: ControladorIcpm, diretorio: Path) -> None:
        """Grava z*, A, B e K em texto, uma linha por linha da matriz."""
        diretorio.mkdir(parents=True, exist_ok=True)
        matrizes = {'z_estrela': controlador.z_estrela, 'A': controlador.a, 'B': controlador.b, 'K': controlador.k}
        for nome, matriz in matrizes.items():
            salvar_matriz(diretorio / ARQUIVOS_MATRIZES[nome], matriz, FORMATO_MATRIZ)
